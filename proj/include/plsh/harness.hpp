#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "plsh/attention.hpp"
#include "plsh/matrix.hpp"

namespace plsh {

// Where a sweep takes its Q/K/V from: seeded Gaussians (one instance per
// seed) or a fixed triple of matrix files shared by all seeds.
struct QkvSource {
    enum class Kind { kSyntheticGaussian, kFile };
    Kind kind = Kind::kSyntheticGaussian;
    double scale = 1.0;       // Gaussian entry standard deviation
    std::string path_prefix;  // for kFile: <prefix>_q.txt, _k.txt, _v.txt
};

struct ExperimentConfig {
    std::int64_t n = 256;
    std::int64_t d = 16;
    std::int64_t d_prime = 16;
    std::vector<double> sigma_list = {2, 4, 8, 16, 32, 64, 128, 256};
    std::vector<std::int64_t> s_list = {1, 10, 100};
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    bool causal = true;
    double delta = 0.01;
    std::string output_path;
    QkvSource qkv;
    int threads = 1;
    bool inject_fault = false;  // test hook: corrupt one audit verdict
};

void validate_config(const ExperimentConfig& config);

// One sweep cell: every measured norm plus run diagnostics. wall_ms is the
// only field that varies between identical runs.
struct ConvergenceRecord {
    std::uint64_t seed = 0;
    std::int64_t n = 0;
    double sigma = 0.0;
    std::int64_t s = 0;
    double res_spec = 0.0;
    double res_max = 0.0;
    double output_err = 0.0;
    double beta_star = 0.0;
    double p_two_inf = 0.0;
    double d_tilde_min = 0.0;
    std::int64_t b_max = 0;
    std::int64_t block_flop_units = 0;
    double wall_ms = 0.0;
    bool bound_holds = true;  // audit verdict; drives exit status, not a CSV column
};

inline constexpr const char* kConvergenceCsvHeader =
    "seed,n,sigma,s,res_spec,res_max,output_err,beta_star,p_two_inf,d_tilde_min,b_max,"
    "block_flop_units,wall_ms";

struct BlocksizeTailRecord {
    double sigma = 0.0;
    std::int64_t s = 0;
    double delta = 0.0;
    double bound = 0.0;
    std::int64_t seeds = 0;
    std::int64_t exceed_count = 0;
    double exceed_fraction = 0.0;
};

// Q, K, V filled with independent Gaussian entries of standard deviation
// scale; deterministic per seed (Q, K and V each use their own child stream,
// so Q is unchanged by varying d').
AttentionInstance gen_synthetic_instance(std::int64_t n, std::int64_t d, std::int64_t d_prime,
                                         std::uint64_t seed, double scale);

// Partition-sampling seed for a sweep cell; stable under reordering of the
// config lists because it mixes the values, not their positions.
std::uint64_t derive_cell_seed(std::uint64_t seed, double sigma, std::int64_t s);

// Full measurement sweep over (seed, sigma, s). Cells are computed
// independently (config.threads of them at a time) and rows are emitted in
// (seed, sigma, s) list order regardless of completion order. When
// output_path is nonempty the CSV is written, and the path is probed for
// writability before any computation starts.
std::vector<ConvergenceRecord> run_convergence_sweep(const ExperimentConfig& config);

// Exceedance statistics of the largest observed block against the analytic
// tail bound, per (sigma, s) cell over all seeds.
std::vector<BlocksizeTailRecord> run_blocksize_tail(const ExperimentConfig& config);

// Ordinary least-squares slope of ln(value) against ln(s).
double fit_loglog_slope(const std::vector<std::pair<double, double>>& points);

// Shortest round-trip decimal representation, '.' separator, no locale.
std::string format_double(double v);

void write_convergence_csv(const std::string& path, const std::vector<ConvergenceRecord>& records);

// Text matrix files: first line "rows,cols", then one comma-separated line
// per row. Read errors name the offending line.
DenseMatrix read_matrix_file(const std::string& path);
void write_matrix_file(const std::string& path, const DenseMatrix& m);

// Flat key=value config text; '#' starts a comment, lists are
// comma-separated. Unknown keys are errors.
void apply_config_file(ExperimentConfig& config, const std::string& path);
void apply_config_entry(ExperimentConfig& config, const std::string& key,
                        const std::string& value);

std::vector<double> parse_double_list(const std::string& text);
std::vector<std::int64_t> parse_int_list(const std::string& text);
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace plsh
