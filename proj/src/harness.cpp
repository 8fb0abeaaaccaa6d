#include "plsh/harness.hpp"

#include <atomic>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "plsh/diagnostics.hpp"
#include "plsh/mask_estimator.hpp"
#include "plsh/rng.hpp"

namespace plsh {

void validate_config(const ExperimentConfig& config) {
    if (config.n < 1) throw std::invalid_argument("config: n must be at least 1");
    if (config.d < 1 || config.d_prime < 1) throw std::invalid_argument("config: dims must be positive");
    if (config.sigma_list.empty() || config.s_list.empty() || config.seeds.empty())
        throw std::invalid_argument("config: sweep lists must be nonempty");
    for (double sg : config.sigma_list)
        if (!(sg > 0.0)) throw std::invalid_argument("config: sigma values must be positive");
    for (std::int64_t s : config.s_list)
        if (s < 1) throw std::invalid_argument("config: s values must be at least 1");
    constexpr double kInvE = 0.36787944117144233;
    if (!(config.delta > 0.0) || config.delta > kInvE)
        throw std::invalid_argument("config: delta outside (0, 1/e]");
    if (config.threads < 1) throw std::invalid_argument("config: threads must be at least 1");
    if (config.qkv.kind == QkvSource::Kind::kSyntheticGaussian && config.qkv.scale < 0.0)
        throw std::invalid_argument("config: scale must be nonnegative");
}

AttentionInstance gen_synthetic_instance(std::int64_t n, std::int64_t d, std::int64_t d_prime,
                                         std::uint64_t seed, double scale) {
    if (n < 1 || d < 1 || d_prime < 1)
        throw std::invalid_argument("gen_synthetic_instance: dimensions must be positive");
    if (scale < 0.0) throw std::invalid_argument("gen_synthetic_instance: negative scale");
    AttentionInstance instance;
    auto fill = [&](DenseMatrix& m, std::int64_t rows, std::int64_t cols, std::uint64_t tag) {
        m = DenseMatrix(rows, cols);
        RandomStream rng = RandomStream::child(seed, tag);
        for (double& v : m.data()) v = scale * rng.gaussian();
    };
    fill(instance.Q, n, d, 0);
    fill(instance.K, n, d, 1);
    fill(instance.V, n, d_prime, 2);
    return instance;
}

std::uint64_t derive_cell_seed(std::uint64_t seed, double sigma, std::int64_t s) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ std::bit_cast<std::uint64_t>(sigma));
    h = splitmix64(h ^ static_cast<std::uint64_t>(s));
    return h;
}

std::string format_double(double v) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, end);
}

namespace {

AttentionInstance load_instance_from_files(const QkvSource& source) {
    AttentionInstance instance;
    instance.Q = read_matrix_file(source.path_prefix + "_q.txt");
    instance.K = read_matrix_file(source.path_prefix + "_k.txt");
    instance.V = read_matrix_file(source.path_prefix + "_v.txt");
    return instance;
}

void probe_writable(const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output path for writing: " + path);
}

std::string record_to_csv_row(const ConvergenceRecord& r) {
    std::string row;
    row += std::to_string(r.seed);
    row += ',';
    row += std::to_string(r.n);
    row += ',';
    row += format_double(r.sigma);
    row += ',';
    row += std::to_string(r.s);
    row += ',';
    row += format_double(r.res_spec);
    row += ',';
    row += format_double(r.res_max);
    row += ',';
    row += format_double(r.output_err);
    row += ',';
    row += format_double(r.beta_star);
    row += ',';
    row += format_double(r.p_two_inf);
    row += ',';
    row += format_double(r.d_tilde_min);
    row += ',';
    row += std::to_string(r.b_max);
    row += ',';
    row += std::to_string(r.block_flop_units);
    row += ',';
    row += format_double(r.wall_ms);
    return row;
}

}  // namespace

std::vector<ConvergenceRecord> run_convergence_sweep(const ExperimentConfig& config) {
    validate_config(config);
    if (!config.output_path.empty()) probe_writable(config.output_path);

    // One instance per seed; sigma varies per cell on top of it.
    std::vector<AttentionInstance> instances;
    instances.reserve(config.seeds.size());
    for (std::uint64_t seed : config.seeds) {
        if (config.qkv.kind == QkvSource::Kind::kFile)
            instances.push_back(load_instance_from_files(config.qkv));
        else
            instances.push_back(gen_synthetic_instance(config.n, config.d, config.d_prime, seed,
                                                       config.qkv.scale));
    }

    const std::size_t n_sigma = config.sigma_list.size();
    const std::size_t n_s = config.s_list.size();
    const std::size_t n_cells = config.seeds.size() * n_sigma * n_s;
    std::vector<ConvergenceRecord> records(n_cells);

    auto run_cell = [&](std::size_t cell) {
        const std::size_t seed_idx = cell / (n_sigma * n_s);
        const std::size_t sigma_idx = (cell / n_s) % n_sigma;
        const std::size_t s_idx = cell % n_s;
        const std::uint64_t seed = config.seeds[seed_idx];
        const double sigma = config.sigma_list[sigma_idx];
        const std::int64_t s = config.s_list[s_idx];

        const auto t0 = std::chrono::steady_clock::now();
        AttentionInstance instance = instances[seed_idx];
        instance.sigma = sigma;
        instance.causal = config.causal;
        const auto partitions =
            sample_partitions(sigma, instance.n(), s, derive_cell_seed(seed, sigma, s));
        const ErrorAudit audit = audit_error_bound(instance, partitions);
        const auto t1 = std::chrono::steady_clock::now();

        ConvergenceRecord& r = records[cell];
        r.seed = seed;
        r.n = instance.n();
        r.sigma = sigma;
        r.s = s;
        r.res_spec = audit.res_spec;
        r.res_max = audit.res_max;
        r.output_err = audit.output_err;
        r.beta_star = audit.beta_star;
        r.p_two_inf = audit.p_two_inf;
        r.d_tilde_min = audit.d_tilde_min;
        r.b_max = audit.b_max;
        r.block_flop_units = audit.work.block_flop_units;
        r.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        r.bound_holds = audit.bound_holds;
    };

    if (config.threads == 1) {
        for (std::size_t cell = 0; cell < n_cells; ++cell) run_cell(cell);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (;;) {
                const std::size_t cell = next.fetch_add(1);
                if (cell >= n_cells) return;
                run_cell(cell);
            }
        };
        std::vector<std::thread> pool;
        const std::size_t count = std::min<std::size_t>(config.threads, n_cells);
        pool.reserve(count);
        for (std::size_t t = 0; t < count; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    if (config.inject_fault && !records.empty()) records.front().bound_holds = false;

    if (!config.output_path.empty()) write_convergence_csv(config.output_path, records);
    return records;
}

std::vector<BlocksizeTailRecord> run_blocksize_tail(const ExperimentConfig& config) {
    validate_config(config);
    std::vector<BlocksizeTailRecord> out;
    out.reserve(config.sigma_list.size() * config.s_list.size());
    for (double sigma : config.sigma_list) {
        for (std::int64_t s : config.s_list) {
            BlocksizeTailRecord rec;
            rec.sigma = sigma;
            rec.s = s;
            rec.delta = config.delta;
            rec.bound = block_size_bound(sigma, s, config.delta);
            rec.seeds = static_cast<std::int64_t>(config.seeds.size());
            for (std::uint64_t seed : config.seeds) {
                const auto partitions =
                    sample_partitions(sigma, config.n, s, derive_cell_seed(seed, sigma, s));
                if (static_cast<double>(block_stats(partitions).b_max) > rec.bound)
                    ++rec.exceed_count;
            }
            rec.exceed_fraction =
                static_cast<double>(rec.exceed_count) / static_cast<double>(rec.seeds);
            out.push_back(rec);
        }
    }
    return out;
}

double fit_loglog_slope(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw std::invalid_argument("fit_loglog_slope: need at least 3 points");
    double mean_x = 0.0, mean_y = 0.0;
    for (const auto& [s, value] : points) {
        if (!(s > 0.0) || !(value > 0.0))
            throw std::invalid_argument("fit_loglog_slope: points must be positive");
        mean_x += std::log(s);
        mean_y += std::log(value);
    }
    mean_x /= static_cast<double>(points.size());
    mean_y /= static_cast<double>(points.size());
    double sxy = 0.0, sxx = 0.0;
    for (const auto& [s, value] : points) {
        const double dx = std::log(s) - mean_x;
        sxy += dx * (std::log(value) - mean_y);
        sxx += dx * dx;
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_loglog_slope: degenerate abscissae");
    return sxy / sxx;
}

void write_convergence_csv(const std::string& path,
                           const std::vector<ConvergenceRecord>& records) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output path for writing: " + path);
    out << kConvergenceCsvHeader << '\n';
    for (const auto& r : records) out << record_to_csv_row(r) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

DenseMatrix read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open matrix file: " + path);
    std::string line;
    auto fail = [&](std::size_t line_no, const std::string& why) {
        throw std::runtime_error("matrix file " + path + " line " + std::to_string(line_no) +
                                 ": " + why);
    };
    if (!std::getline(in, line)) fail(1, "missing header");
    std::int64_t rows = 0, cols = 0;
    {
        std::istringstream header(line);
        char comma = 0;
        if (!(header >> rows >> comma >> cols) || comma != ',' || rows < 1 || cols < 1)
            fail(1, "expected 'rows,cols'");
    }
    DenseMatrix m(rows, cols);
    for (std::int64_t i = 0; i < rows; ++i) {
        if (!std::getline(in, line)) fail(static_cast<std::size_t>(i) + 2, "missing row");
        const char* p = line.c_str();
        const char* end = p + line.size();
        for (std::int64_t j = 0; j < cols; ++j) {
            double v = 0.0;
            const auto [next, ec] = std::from_chars(p, end, v);
            if (ec != std::errc{} || !std::isfinite(v))
                fail(static_cast<std::size_t>(i) + 2, "bad value in column " + std::to_string(j));
            m(i, j) = v;
            p = next;
            if (j + 1 < cols) {
                if (p >= end || *p != ',')
                    fail(static_cast<std::size_t>(i) + 2, "expected ',' after column " +
                                                              std::to_string(j));
                ++p;
            }
        }
        if (p != end) fail(static_cast<std::size_t>(i) + 2, "trailing characters");
    }
    return m;
}

void write_matrix_file(const std::string& path, const DenseMatrix& m) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open matrix file for writing: " + path);
    out << m.rows() << ',' << m.cols() << '\n';
    for (std::int64_t i = 0; i < m.rows(); ++i) {
        for (std::int64_t j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(begin, last - begin + 1);
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& text, Parse parse) {
    std::vector<T> out;
    std::istringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw std::invalid_argument("empty list element");
        out.push_back(parse(item));
    }
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

bool parse_bool(const std::string& text) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw std::invalid_argument("expected boolean, got '" + text + "'");
}

QkvSource parse_qkv_source(const std::string& text) {
    QkvSource source;
    const auto open = text.find('(');
    if (open == std::string::npos || text.back() != ')')
        throw std::invalid_argument("qkv_source: expected kind(arg), got '" + text + "'");
    const std::string kind = text.substr(0, open);
    const std::string arg = text.substr(open + 1, text.size() - open - 2);
    if (kind == "synthetic-gaussian") {
        source.kind = QkvSource::Kind::kSyntheticGaussian;
        source.scale = std::stod(arg);
    } else if (kind == "file") {
        source.kind = QkvSource::Kind::kFile;
        source.path_prefix = arg;
    } else {
        throw std::invalid_argument("qkv_source: unknown kind '" + kind + "'");
    }
    return source;
}

}  // namespace

std::vector<double> parse_double_list(const std::string& text) {
    return parse_list<double>(text, [](const std::string& s) { return std::stod(s); });
}

std::vector<std::int64_t> parse_int_list(const std::string& text) {
    return parse_list<std::int64_t>(
        text, [](const std::string& s) { return static_cast<std::int64_t>(std::stoll(s)); });
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    return parse_list<std::uint64_t>(
        text, [](const std::string& s) { return static_cast<std::uint64_t>(std::stoull(s)); });
}

void apply_config_entry(ExperimentConfig& config, const std::string& key,
                        const std::string& value) {
    if (key == "n") config.n = std::stoll(value);
    else if (key == "d") config.d = std::stoll(value);
    else if (key == "d_prime") config.d_prime = std::stoll(value);
    else if (key == "sigma_list") config.sigma_list = parse_double_list(value);
    else if (key == "s_list") config.s_list = parse_int_list(value);
    else if (key == "seeds") config.seeds = parse_seed_list(value);
    else if (key == "causal") config.causal = parse_bool(value);
    else if (key == "delta") config.delta = std::stod(value);
    else if (key == "output_path") config.output_path = value;
    else if (key == "qkv_source") config.qkv = parse_qkv_source(value);
    else if (key == "threads") config.threads = static_cast<int>(std::stol(value));
    else throw std::invalid_argument("config: unknown key '" + key + "'");
}

void apply_config_file(ExperimentConfig& config, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config file " + path + " line " +
                                        std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            apply_config_entry(config, key, value);
        } catch (const std::exception& e) {
            throw std::invalid_argument("config file " + path + " line " +
                                        std::to_string(line_no) + ": " + e.what());
        }
    }
}

}  // namespace plsh
