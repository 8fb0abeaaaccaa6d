// Command-line front end for the positional-hash attention library.
// Exit codes: 0 success, 1 scientific assertion failure, 2 usage or I/O error.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "plsh/alibi.hpp"
#include "plsh/block_attention.hpp"
#include "plsh/diagnostics.hpp"
#include "plsh/harness.hpp"
#include "plsh/mask_estimator.hpp"
#include "plsh/rbf_lsh.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAssertFailed = 1;
constexpr int kExitUsage = 2;

struct PairArg {
    double i = 0.0;
    double j = 0.0;
};

std::vector<PairArg> parse_pairs(const std::string& text) {
    std::vector<PairArg> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const std::string item =
            text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("--pairs: expected i:j, got '" + item + "'");
        PairArg p;
        p.i = std::stod(item.substr(0, colon));
        p.j = std::stod(item.substr(colon + 1));
        out.push_back(p);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (out.empty()) throw std::invalid_argument("--pairs: empty list");
    return out;
}

std::vector<std::uint64_t> make_seed_range(std::int64_t count, std::uint64_t base) {
    if (count < 1) throw std::invalid_argument("--seed-count must be at least 1");
    std::vector<std::uint64_t> seeds;
    seeds.reserve(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) seeds.push_back(base + static_cast<std::uint64_t>(i));
    return seeds;
}

int cmd_collision_check(double sigma, std::int64_t trials, std::uint64_t seed,
                        const std::string& pairs_text) {
    const auto pairs = parse_pairs(pairs_text);
    bool all_pass = true;
    for (const auto& [i, j] : pairs) {
        const double analytic = std::exp(-std::abs(i - j) / sigma);
        const double empirical = plsh::estimate_collision_probability(i, j, sigma, trials, seed);
        const double tol = 3.0 * std::sqrt(analytic * (1.0 - analytic) / static_cast<double>(trials));
        const bool pass = std::abs(empirical - analytic) <= tol;
        all_pass = all_pass && pass;
        std::cout << "pair=" << plsh::format_double(i) << ':' << plsh::format_double(j)
                  << " analytic=" << plsh::format_double(analytic)
                  << " empirical=" << plsh::format_double(empirical)
                  << " tol=" << plsh::format_double(tol) << " pass=" << (pass ? 1 : 0) << '\n';
    }
    std::cout << "all_pass=" << (all_pass ? 1 : 0) << '\n';
    return all_pass ? kExitOk : kExitAssertFailed;
}

int cmd_sample_masks(double sigma, std::int64_t n, std::int64_t s, std::uint64_t seed) {
    const auto partitions = plsh::sample_partitions(sigma, n, s, seed);
    for (const auto& p : partitions) {
        for (std::size_t k = 0; k < p.boundaries.size(); ++k) {
            if (k) std::cout << ',';
            std::cout << p.boundaries[k];
        }
        std::cout << '\n';
    }
    return kExitOk;
}

int cmd_convergence(const plsh::ExperimentConfig& config) {
    const auto records = plsh::run_convergence_sweep(config);
    std::int64_t failures = 0;
    for (const auto& r : records)
        if (!r.bound_holds) ++failures;
    std::cout << "records=" << records.size() << " audit_failures=" << failures
              << " output=" << config.output_path << '\n';
    return failures == 0 ? kExitOk : kExitAssertFailed;
}

int cmd_blocksize_tail(const plsh::ExperimentConfig& config) {
    const auto records = plsh::run_blocksize_tail(config);
    for (const auto& r : records) {
        std::cout << "sigma=" << plsh::format_double(r.sigma) << " s=" << r.s
                  << " delta=" << plsh::format_double(r.delta)
                  << " bound=" << plsh::format_double(r.bound) << " seeds=" << r.seeds
                  << " exceed_count=" << r.exceed_count
                  << " exceed_fraction=" << plsh::format_double(r.exceed_fraction) << '\n';
    }
    return kExitOk;
}

int cmd_attention_compare(const plsh::AttentionInstance& instance, std::int64_t s,
                          std::uint64_t seed, bool force_single_block) {
    std::vector<plsh::BlockPartition> partitions;
    if (force_single_block) {
        plsh::BlockPartition full;
        full.n = instance.n();
        full.boundaries = {0, instance.n()};
        partitions.push_back(full);
    } else {
        partitions = plsh::sample_partitions(instance.sigma, instance.n(), s,
                                             plsh::derive_cell_seed(seed, instance.sigma, s));
    }
    const plsh::ErrorAudit audit = plsh::audit_error_bound(instance, partitions);
    std::cout << "n=" << instance.n() << '\n'
              << "sigma=" << plsh::format_double(instance.sigma) << '\n'
              << "s=" << partitions.size() << '\n'
              << "causal=" << (instance.causal ? 1 : 0) << '\n'
              << "beta_star=" << plsh::format_double(audit.beta_star) << '\n'
              << "p_two_inf=" << plsh::format_double(audit.p_two_inf) << '\n'
              << "res_max=" << plsh::format_double(audit.res_max) << '\n'
              << "res_spec=" << plsh::format_double(audit.res_spec) << '\n'
              << "d_tilde_min=" << plsh::format_double(audit.d_tilde_min) << '\n'
              << "output_err=" << plsh::format_double(audit.output_err) << '\n'
              << "bound_value=" << plsh::format_double(audit.bound_value) << '\n'
              << "b_max=" << audit.b_max << '\n'
              << "block_flop_units=" << audit.work.block_flop_units << '\n'
              << "degenerate=" << (audit.degenerate ? 1 : 0) << '\n'
              << "fallback_rows=" << audit.fallback_rows << '\n'
              << "bound_holds=" << (audit.bound_holds ? 1 : 0) << '\n'
              << "pass=" << (audit.bound_holds ? 1 : 0) << '\n';
    return audit.bound_holds ? kExitOk : kExitAssertFailed;
}

int cmd_gen_qkv(std::int64_t n, std::int64_t d, std::int64_t d_prime, std::uint64_t seed,
                double scale, const std::string& out_prefix) {
    const auto instance = plsh::gen_synthetic_instance(n, d, d_prime, seed, scale);
    plsh::write_matrix_file(out_prefix + "_q.txt", instance.Q);
    plsh::write_matrix_file(out_prefix + "_k.txt", instance.K);
    plsh::write_matrix_file(out_prefix + "_v.txt", instance.V);
    std::cout << "q=" << out_prefix << "_q.txt\n"
              << "k=" << out_prefix << "_k.txt\n"
              << "v=" << out_prefix << "_v.txt\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Randomized block-mask approximation of ALiBi-biased attention"};
    app.require_subcommand(1);

    // collision-check
    auto* collision = app.add_subcommand(
        "collision-check", "Empirical vs analytic hash collision probability per position pair");
    double cc_sigma = 0.0;
    std::int64_t cc_trials = 100000;
    std::uint64_t cc_seed = 1;
    std::string cc_pairs = "0:1";
    collision->add_option("--sigma", cc_sigma, "Decay bandwidth")->required();
    collision->add_option("--trials", cc_trials, "Hash draws per pair")
        ->check(CLI::PositiveNumber);
    collision->add_option("--seed", cc_seed, "Master seed");
    collision->add_option("--pairs", cc_pairs, "Comma-separated i:j position pairs");

    // sample-masks
    auto* masks = app.add_subcommand("sample-masks",
                                     "Dump sampled block partitions as boundary lists");
    double sm_sigma = 0.0;
    std::int64_t sm_n = 0, sm_s = 1;
    std::uint64_t sm_seed = 1;
    masks->add_option("--sigma", sm_sigma, "Decay bandwidth")->required();
    masks->add_option("--n", sm_n, "Context length")->required()->check(CLI::PositiveNumber);
    masks->add_option("--s", sm_s, "Sample count")->check(CLI::PositiveNumber);
    masks->add_option("--seed", sm_seed, "Master seed");

    // convergence
    auto* conv = app.add_subcommand("convergence",
                                    "Sweep (seed, sigma, s) cells and write the measurement CSV");
    std::string conv_config_path;
    std::int64_t conv_n = 0, conv_d = 0, conv_d_prime = 0;
    std::string conv_sigma_list, conv_s_list, conv_seeds;
    std::int64_t conv_seed_count = 0;
    std::uint64_t conv_seed_base = 1;
    bool conv_causal = false, conv_non_causal = false, conv_inject = false;
    double conv_delta = 0.0, conv_scale = 0.0;
    std::string conv_output, conv_qkv_source;
    int conv_threads = 0;
    conv->add_option("--config", conv_config_path, "Flat key=value config file");
    conv->add_option("--n", conv_n, "Context length");
    conv->add_option("--d", conv_d, "Query/key width");
    conv->add_option("--d-prime", conv_d_prime, "Value width");
    conv->add_option("--sigma-list", conv_sigma_list, "Comma-separated bandwidths");
    conv->add_option("--s-list", conv_s_list, "Comma-separated sample counts");
    auto* conv_seeds_opt = conv->add_option("--seeds", conv_seeds, "Comma-separated seeds");
    auto* conv_seed_count_opt =
        conv->add_option("--seed-count", conv_seed_count, "Generate this many consecutive seeds");
    conv->add_option("--seed-base", conv_seed_base, "First seed for --seed-count");
    conv_seeds_opt->excludes(conv_seed_count_opt);
    conv->add_flag("--causal", conv_causal, "Causal attention");
    conv->add_flag("--non-causal", conv_non_causal, "Non-causal attention");
    conv->add_option("--delta", conv_delta, "Tail probability");
    conv->add_option("--scale", conv_scale, "Gaussian Q/K/V entry scale");
    conv->add_option("--qkv-source", conv_qkv_source,
                     "synthetic-gaussian(scale) or file(prefix)");
    conv->add_option("--output", conv_output, "CSV output path");
    conv->add_option("--threads", conv_threads, "Concurrent sweep cells");
    conv->add_flag("--inject-fault", conv_inject, "Corrupt one audit verdict (CI hook)");

    // blocksize-tail
    auto* tail = app.add_subcommand("blocksize-tail",
                                    "Exceedance of the analytic block-size tail bound");
    std::string tail_config_path;
    std::int64_t tail_n = 0;
    std::string tail_sigma_list, tail_s_list, tail_seeds;
    std::int64_t tail_seed_count = 0;
    std::uint64_t tail_seed_base = 1;
    double tail_delta = 0.0;
    tail->add_option("--config", tail_config_path, "Flat key=value config file");
    tail->add_option("--n", tail_n, "Context length");
    tail->add_option("--sigma-list", tail_sigma_list, "Comma-separated bandwidths");
    tail->add_option("--s-list", tail_s_list, "Comma-separated sample counts");
    auto* tail_seeds_opt = tail->add_option("--seeds", tail_seeds, "Comma-separated seeds");
    auto* tail_seed_count_opt =
        tail->add_option("--seed-count", tail_seed_count, "Generate this many consecutive seeds");
    tail->add_option("--seed-base", tail_seed_base, "First seed for --seed-count");
    tail_seeds_opt->excludes(tail_seed_count_opt);
    tail->add_option("--delta", tail_delta, "Tail probability");

    // attention-compare
    auto* compare = app.add_subcommand(
        "attention-compare", "One audited run: exact vs blockwise biased attention");
    double ac_sigma = 8.0, ac_scale = 1.0;
    std::int64_t ac_s = 16, ac_n = 64, ac_d = 8, ac_d_prime = 8;
    std::uint64_t ac_seed = 1;
    bool ac_causal = false, ac_force_single = false;
    std::string ac_q, ac_k, ac_v;
    compare->add_option("--sigma", ac_sigma, "Decay bandwidth");
    compare->add_option("--s", ac_s, "Sample count")->check(CLI::PositiveNumber);
    compare->add_option("--seed", ac_seed, "Master seed");
    compare->add_flag("--causal", ac_causal, "Causal attention");
    compare->add_option("--n", ac_n, "Context length (synthetic input)");
    compare->add_option("--d", ac_d, "Query/key width (synthetic input)");
    compare->add_option("--d-prime", ac_d_prime, "Value width (synthetic input)");
    compare->add_option("--scale", ac_scale, "Gaussian entry scale (synthetic input)");
    auto* ac_q_opt = compare->add_option("--q", ac_q, "Query matrix file");
    auto* ac_k_opt = compare->add_option("--k", ac_k, "Key matrix file");
    auto* ac_v_opt = compare->add_option("--v", ac_v, "Value matrix file");
    ac_q_opt->needs(ac_k_opt)->needs(ac_v_opt);
    ac_k_opt->needs(ac_q_opt);
    ac_v_opt->needs(ac_q_opt);
    compare->add_flag("--force-single-block", ac_force_single,
                      "Use one full-context block instead of sampling");

    // gen-qkv
    auto* gen = app.add_subcommand("gen-qkv", "Write synthetic Gaussian Q/K/V matrix files");
    std::int64_t gq_n = 64, gq_d = 8, gq_d_prime = 8;
    std::uint64_t gq_seed = 1;
    double gq_scale = 1.0;
    std::string gq_out;
    gen->add_option("--n", gq_n, "Context length")->check(CLI::PositiveNumber);
    gen->add_option("--d", gq_d, "Query/key width")->check(CLI::PositiveNumber);
    gen->add_option("--d-prime", gq_d_prime, "Value width")->check(CLI::PositiveNumber);
    gen->add_option("--seed", gq_seed, "Master seed");
    gen->add_option("--scale", gq_scale, "Gaussian entry scale");
    gen->add_option("--out", gq_out, "Output path prefix")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (collision->parsed())
            return cmd_collision_check(cc_sigma, cc_trials, cc_seed, cc_pairs);

        if (masks->parsed()) return cmd_sample_masks(sm_sigma, sm_n, sm_s, sm_seed);

        if (conv->parsed()) {
            plsh::ExperimentConfig config;
            if (!conv_config_path.empty()) plsh::apply_config_file(config, conv_config_path);
            // CLI flags override config-file values.
            if (conv->count("--n")) config.n = conv_n;
            if (conv->count("--d")) config.d = conv_d;
            if (conv->count("--d-prime")) config.d_prime = conv_d_prime;
            if (conv->count("--sigma-list"))
                config.sigma_list = plsh::parse_double_list(conv_sigma_list);
            if (conv->count("--s-list")) config.s_list = plsh::parse_int_list(conv_s_list);
            if (conv->count("--seeds")) config.seeds = plsh::parse_seed_list(conv_seeds);
            if (conv->count("--seed-count"))
                config.seeds = make_seed_range(conv_seed_count, conv_seed_base);
            if (conv_causal) config.causal = true;
            if (conv_non_causal) config.causal = false;
            if (conv->count("--delta")) config.delta = conv_delta;
            if (conv->count("--scale")) config.qkv.scale = conv_scale;
            if (conv->count("--qkv-source"))
                plsh::apply_config_entry(config, "qkv_source", conv_qkv_source);
            if (conv->count("--output")) config.output_path = conv_output;
            if (conv->count("--threads")) config.threads = conv_threads;
            config.inject_fault = conv_inject;
            if (config.output_path.empty()) config.output_path = "convergence.csv";
            return cmd_convergence(config);
        }

        if (tail->parsed()) {
            plsh::ExperimentConfig config;
            config.seeds = make_seed_range(20, 1);
            if (!tail_config_path.empty()) plsh::apply_config_file(config, tail_config_path);
            if (tail->count("--n")) config.n = tail_n;
            if (tail->count("--sigma-list"))
                config.sigma_list = plsh::parse_double_list(tail_sigma_list);
            if (tail->count("--s-list")) config.s_list = plsh::parse_int_list(tail_s_list);
            if (tail->count("--seeds")) config.seeds = plsh::parse_seed_list(tail_seeds);
            if (tail->count("--seed-count"))
                config.seeds = make_seed_range(tail_seed_count, tail_seed_base);
            if (tail->count("--delta")) config.delta = tail_delta;
            return cmd_blocksize_tail(config);
        }

        if (compare->parsed()) {
            plsh::AttentionInstance instance;
            if (compare->count("--q")) {
                instance.Q = plsh::read_matrix_file(ac_q);
                instance.K = plsh::read_matrix_file(ac_k);
                instance.V = plsh::read_matrix_file(ac_v);
            } else {
                instance = plsh::gen_synthetic_instance(ac_n, ac_d, ac_d_prime, ac_seed, ac_scale);
            }
            instance.sigma = ac_sigma;
            instance.causal = ac_causal;
            return cmd_attention_compare(instance, ac_s, ac_seed, ac_force_single);
        }

        if (gen->parsed())
            return cmd_gen_qkv(gq_n, gq_d, gq_d_prime, gq_seed, gq_scale, gq_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
