#include "fspde/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <span>
#include <sstream>
#include <thread>

#include "fspde/errors.hpp"
#include "fspde/philox.hpp"
#include "fspde/stats.hpp"
#include "fspde/verify.hpp"

namespace fspde {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const CliOptions& opts, const std::string& name) {
    fs::create_directories(opts.out_dir);
    const fs::path p = fs::path(opts.out_dir) / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file " + p.string());
    return out;
}

ModelConstants constants_from_config(const RunConfig& cfg) {
    const double ref_N =
        cfg.truncation_levels.empty() ? 5.0 : cfg.truncation_levels.back();
    ModelConstants mc = make_model_constants(cfg.model, cfg.b, cfg.sigma,
                                             cfg.initial.sup(cfg.grid), ref_N, cfg.constant_c);
    mc.K0_override = cfg.K0;
    return mc;
}

void write_report_csv(std::ostream& out, std::span<const BoundReport> reports) {
    out << "quantity,t,x,k_or_N,estimate,ci_lo,ci_hi,envelope,verdict\n";
    out.precision(17);
    for (const auto& r : reports) {
        out << to_string(r.quantity) << ',' << r.t << ',' << r.x << ',' << r.k_or_N << ','
            << r.estimate << ',' << r.ci_lo << ',' << r.ci_hi << ',' << r.envelope << ','
            << (r.asserted ? to_string(r.verdict) : "not-asserted") << '\n';
    }
}

void put_u32(std::ostream& out, std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); }
void put_u64(std::ostream& out, std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); }
void put_f64(std::ostream& out, double v) { out.write(reinterpret_cast<const char*>(&v), 8); }

}  // namespace

int cmd_constants(const RunConfig& cfg, const CliOptions& opts) {
    const ModelConstants mc = constants_from_config(cfg);
    const double T = cfg.grid.T;
    const auto threshold = convergence_threshold(mc, mc.c, T);

    std::vector<std::pair<std::string, double>> rows = {
        {"alpha", cfg.model.alpha},
        {"beta", cfg.model.beta},
        {"ratio", mc.rho()},
        {"cstar", mc.cstar},
        {"L_b", mc.L_b},
        {"L_sigma", mc.L_sigma},
        {"L_Nb", mc.L_Nb},
        {"L_Nsigma", mc.L_Nsigma},
        {"u0_sup", mc.u0_sup},
        {"C0", mc.c0()},
        {"C_hash", mc.chash()},
        {"A0", mc.a0()},
        {"c", mc.c},
        {"N_T", threshold.N_T},
        {"c_T", threshold.c_T},
    };
    if (mc.sigma_sup) {
        rows.emplace_back("sigma_sup", *mc.sigma_sup);
        rows.emplace_back("Cstar_big", mc.cstar_big(T));
        rows.emplace_back("K0", mc.k0(T));
    }
    if (mc.L_Nsigma > 0.0) rows.emplace_back("gamma_choice", gamma_choice(mc, mc.c));
    if (mc.L_sigma > 0.0) {
        const double k = std::max(2.0, std::pow(mc.L_b, 1.0 - mc.rho()) / (mc.L_sigma * mc.L_sigma));
        rows.emplace_back("contraction_value", prop4_contraction_value(cfg.model, mc.cstar, mc.L_b,
                                                                       mc.L_sigma, k));
    }

    std::cout.precision(12);
    for (const auto& [key, value] : rows) std::cout << key << " = " << value << '\n';

    auto csv = open_out(opts, "constants.csv");
    csv.precision(17);
    csv << "key,value\n";
    for (const auto& [key, value] : rows) csv << key << ',' << value << '\n';
    return kExitOk;
}

int cmd_kernel(const RunConfig& cfg, const CliOptions& opts) {
    const std::vector<double> times =
        cfg.probe_times.empty() ? cfg.grid.times() : cfg.probe_times;
    const KernelTable table = build_kernel_table(cfg.model, times, cfg.grid.spatial());
    if (table.aliasing_warning()) {
        std::cerr << "warning: symbol not decayed at the Nyquist wavenumber; dx too coarse for the "
                     "sharpest kernel peak\n";
    }

    const double cst = cstar(cfg.model.alpha, cfg.model.beta);
    bool ok = true;
    std::cout.precision(12);
    for (std::size_t n = 0; n < table.times().size(); ++n) {
        const double t = table.times()[n];
        const auto row = table.row(n);
        double mass = 0.0, sym_resid = 0.0;
        for (std::size_t j = 0; j < table.nx(); ++j) {
            mass += row[j] * table.dx();
            const std::size_t jm = (table.nx() - j) % table.nx();
            sym_resid = std::max(sym_resid, std::abs(row[j] - row[jm]));
        }
        const double l2 = kernel_l2_norm(table, t);
        const double l2_ref = cst * std::pow(t, -cfg.model.ratio());
        const double l2_rel = std::abs(l2 - l2_ref) / l2_ref;
        const bool row_ok = std::abs(mass - 1.0) <= 1e-4 && sym_resid < 1e-10 && l2_rel <= 0.01;
        ok = ok && row_ok;
        std::cout << "t=" << t << " mass=" << mass << " sym_resid=" << sym_resid
                  << " l2=" << l2 << " l2_ref=" << l2_ref << " l2_rel_err=" << l2_rel
                  << (row_ok ? " [ok]" : " [FAIL]") << '\n';
    }

    auto csv = open_out(opts, "kernel.csv");
    csv.precision(17);
    csv << "t,x,G\n";
    for (std::size_t n = 0; n < table.times().size(); ++n) {
        for (std::size_t j = 0; j < table.nx(); ++j) {
            csv << table.times()[n] << ',' << table.xs()[j] << ',' << table.value(n, j) << '\n';
        }
    }
    return ok ? kExitOk : kExitVerifyFail;
}

int cmd_simulate(const RunConfig& cfg, const CliOptions& opts) {
    RunConfig run = cfg;
    if (opts.seed_override) run.base_seed = *opts.seed_override;

    const KernelTable table = solver_kernel_table(run.model, run.grid);
    {
        const double cst = cstar(run.model.alpha, run.model.beta);
        if (run.grid.noise_variance_flag(cst, run.model.ratio())) {
            std::cerr << "warning: single-step noise variance C* dt^{1-r}/(1-r) is not < 1\n";
        }
    }
    const std::vector<double> u0 = run.initial.sample(run.grid);
    const std::optional<double> level =
        run.truncation_levels.empty() ? std::nullopt
                                      : std::optional<double>(run.truncation_levels.back());

    auto bin = open_out(opts, "ensemble.bin");
    bin.write("FSPDENS1", 8);
    put_u32(bin, 1u);
    put_u64(bin, run.content_hash());
    put_u64(bin, run.base_seed);
    put_u32(bin, static_cast<std::uint32_t>(run.replicas));
    put_u32(bin, static_cast<std::uint32_t>(run.grid.nt));
    put_u32(bin, static_cast<std::uint32_t>(run.grid.nx));
    put_f64(bin, run.grid.T);
    put_f64(bin, run.grid.half_width);
    put_u32(bin, level ? 1u : 0u);
    put_f64(bin, level.value_or(0.0));

    // Probe running statistics for the summary file.
    std::vector<std::string> warnings;
    const auto probes = run.probes(&warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    std::vector<std::vector<double>> probe_samples(probes.size());

    // Chunked evaluation: parallel inside a chunk, sequential writes in
    // replica order so the output bytes are independent of the thread count.
    const std::size_t chunk = std::max<std::size_t>(16, static_cast<std::size_t>(opts.threads) * 4);
    for (std::size_t start = 0; start < run.replicas; start += chunk) {
        const std::size_t count = std::min(chunk, run.replicas - start);
        std::vector<FieldPath> paths(count);
        {
            std::vector<std::thread> pool;
            std::atomic<std::size_t> next{0};
            std::exception_ptr error;
            std::mutex error_mutex;
            const int workers = std::max(1, std::min<int>(opts.threads, static_cast<int>(count)));
            auto body = [&](std::size_t i) {
                const std::uint64_t seed = replica_seed(run.base_seed, start + i);
                const NoisePath noise = sample_noise(run.grid, seed);
                paths[i] = level ? evolve_truncated(u0, run.b, run.sigma, *level, run.grid, noise,
                                                    table)
                                 : evolve(u0, run.b, run.sigma, run.grid, noise, table);
            };
            if (workers == 1) {
                for (std::size_t i = 0; i < count; ++i) body(i);
            } else {
                for (int w = 0; w < workers; ++w) {
                    pool.emplace_back([&] {
                        while (true) {
                            const std::size_t i = next.fetch_add(1);
                            if (i >= count) break;
                            try {
                                body(i);
                            } catch (...) {
                                std::lock_guard<std::mutex> lock(error_mutex);
                                if (!error) error = std::current_exception();
                                break;
                            }
                        }
                    });
                }
                for (auto& th : pool) th.join();
                if (error) std::rethrow_exception(error);
            }
        }
        for (std::size_t i = 0; i < count; ++i) {
            put_u64(bin, paths[i].seed);
            const auto& v = paths[i].values;
            bin.write(reinterpret_cast<const char*>(v.data()),
                      static_cast<std::streamsize>(v.size() * sizeof(double)));
            for (std::size_t p = 0; p < probes.size(); ++p) {
                probe_samples[p].push_back(paths[i].at(probes[p].time_index, probes[p].space_index));
            }
        }
        // plot-ready snapshot of the first replica
        if (start == 0) {
            auto field = open_out(opts, "field.csv");
            field.precision(17);
            field << "t,x,u\n";
            const auto& path = paths[0];
            for (std::size_t n = 0; n <= run.grid.nt; ++n) {
                const double t = run.grid.dt() * static_cast<double>(n);
                for (std::size_t j = 0; j < run.grid.nx; ++j) {
                    const double x = -run.grid.half_width + run.grid.dx() * static_cast<double>(j);
                    field << t << ',' << x << ',' << path.at(n, j) << '\n';
                }
            }
        }
    }

    auto csv = open_out(opts, "summary.csv");
    csv.precision(17);
    csv << "t,x,mean,variance,abs_max\n";
    for (std::size_t p = 0; p < probes.size(); ++p) {
        const auto& s = probe_samples[p];
        double abs_max = 0.0;
        for (double v : s) abs_max = std::max(abs_max, std::abs(v));
        csv << probes[p].time(run.grid) << ',' << probes[p].x(run.grid) << ',' << mean(s) << ','
            << (s.size() > 1 ? variance(s) : 0.0) << ',' << abs_max << '\n';
    }
    std::cerr << "wrote " << run.replicas << " replicas\n";
    return kExitOk;
}

namespace {

std::vector<BoundReport> verify_moments(const RunConfig& cfg, const CliOptions& opts,
                                        const ModelConstants& mc, const KernelTable& table) {
    RunConfig run = cfg;
    if (opts.seed_override) run.base_seed = *opts.seed_override;
    std::vector<std::string> warnings;
    const auto probes = run.probes(&warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    if (probes.empty()) throw ConfigError("verify moments: no probes configured");
    if (run.moment_orders.empty()) throw ConfigError("verify moments: no moment orders configured");

    StudySetup setup{run.model, run.grid, run.b, run.sigma, run.initial.sample(run.grid),
                     run.base_seed, run.replicas, opts.threads};
    const auto samples = run_probe_samples(setup, table, std::nullopt, probes);

    std::vector<BoundReport> reports;
    for (double k : run.moment_orders) {
        for (std::size_t p = 0; p < probes.size(); ++p) {
            const std::uint64_t bseed = split_seed(run.base_seed, 0x6d6f6d00u + p * 131 +
                                                                       static_cast<std::uint64_t>(k));
            reports.push_back(check_moment_bounds(samples[p], mc, k, probes[p].time(run.grid),
                                                  probes[p].x(run.grid), bseed));
        }
    }
    return reports;
}

std::vector<BoundReport> verify_tails(const RunConfig& cfg, const CliOptions& opts,
                                      const ModelConstants& mc, const KernelTable& table) {
    RunConfig run = cfg;
    if (opts.seed_override) run.base_seed = *opts.seed_override;
    std::vector<std::string> warnings;
    const auto probes = run.probes(&warnings);
    if (probes.empty()) throw ConfigError("verify tails: no probes configured");

    // Smallest valid truncation level for the configured sigma regime.
    double N = 0.0;
    if (mc.sigma_sup) {
        for (const auto& p : probes) {
            N = std::max(N, tail_threshold_bounded_sigma(mc, p.time(run.grid)));
        }
    } else {
        const auto thr = convergence_threshold(mc, mc.c, run.grid.T);
        N = std::max(thr.N_T, thr.c_T);
        for (const auto& p : probes) N = std::max(N, tail_threshold_linear(mc, p.time(run.grid)));
    }
    if (N + 1.0 > 700.0) throw ConfigError("verify tails: required truncation level overflows");

    StudySetup setup{run.model, run.grid, run.b, run.sigma, run.initial.sample(run.grid),
                     run.base_seed, run.replicas, opts.threads};
    const auto samples = run_probe_samples(setup, table, N + 1.0, probes);

    std::vector<BoundReport> reports;
    for (std::size_t p = 0; p < probes.size(); ++p) {
        reports.push_back(
            check_tail_bound(samples[p], mc, N, probes[p].time(run.grid), probes[p].x(run.grid)));
    }
    return reports;
}

std::vector<BoundReport> verify_convergence(const RunConfig& cfg, const CliOptions& opts,
                                            const KernelTable& table) {
    RunConfig run = cfg;
    if (opts.seed_override) run.base_seed = *opts.seed_override;
    if (run.truncation_levels.size() < 2) {
        throw ConfigError("verify converge: need truncation.N_list with at least 2 levels");
    }
    std::vector<std::string> warnings;
    const auto probes = run.probes(&warnings);
    if (probes.empty()) throw ConfigError("verify converge: no probes configured");
    const double k = run.moment_orders.empty() ? 2.0 : run.moment_orders.front();

    StudySetup setup{run.model, run.grid, run.b, run.sigma, run.initial.sample(run.grid),
                     run.base_seed, run.replicas, opts.threads};
    const auto study = convergence_study(setup, table, run.truncation_levels, k, probes);
    const auto uniq = uniqueness_probe(setup, table, replica_seed(run.base_seed, 0),
                                       run.truncation_levels.back() + 5.0,
                                       run.truncation_levels.back() + 10.0);

    std::vector<BoundReport> reports;
    for (std::size_t i = 0; i < study.levels.size(); ++i) {
        BoundReport rep;
        rep.quantity = Quantity::convergence;
        rep.t = run.grid.T;
        rep.x = 0.0;
        rep.k_or_N = study.levels[i];
        rep.estimate = study.d_N[i];
        rep.ci_lo = rep.ci_hi = study.d_N[i];
        rep.envelope = i == 0 ? HUGE_VAL : study.d_N[i - 1];  // monotone target
        rep.log_envelope = std::log(rep.envelope);
        rep.verdict = i == 0 || study.d_N[i] <= study.d_N[i - 1] ? Verdict::pass : Verdict::fail;
        reports.push_back(rep);
    }
    BoundReport uniq_rep;
    uniq_rep.quantity = Quantity::convergence;
    uniq_rep.t = run.grid.T;
    uniq_rep.k_or_N = 0.0;
    uniq_rep.estimate = uniq.sup_abs_diff;
    uniq_rep.ci_lo = uniq_rep.ci_hi = uniq.sup_abs_diff;
    uniq_rep.envelope = 1e-10;
    uniq_rep.log_envelope = std::log(1e-10);
    uniq_rep.verdict = uniq.sup_abs_diff <= 1e-10 ? Verdict::pass : Verdict::fail;
    reports.push_back(uniq_rep);

    std::cout.precision(12);
    std::cout << "convergence fitted slope (log d_N vs N^{2-r}): " << study.fitted_slope << '\n';
    if (study.first_zero_index) {
        std::cout << "first vanishing level: N = " << study.levels[*study.first_zero_index] << '\n';
    }
    std::cout << "uniqueness probe sup diff: " << uniq.sup_abs_diff << '\n';
    return reports;
}

}  // namespace

int cmd_verify(const RunConfig& cfg, const CliOptions& opts, const std::string& which) {
    if (which != "moments" && which != "tails" && which != "converge" && which != "all") {
        throw ConfigError("verify: 'which' must be moments|tails|converge|all");
    }
    const ModelConstants mc = constants_from_config(cfg);
    const KernelTable table = solver_kernel_table(cfg.model, cfg.grid);

    std::vector<BoundReport> reports;
    if (which == "moments" || which == "all") {
        const auto r = verify_moments(cfg, opts, mc, table);
        reports.insert(reports.end(), r.begin(), r.end());
    }
    if (which == "tails" || which == "all") {
        const auto r = verify_tails(cfg, opts, mc, table);
        reports.insert(reports.end(), r.begin(), r.end());
    }
    if (which == "converge" || which == "all") {
        const auto r = verify_convergence(cfg, opts, table);
        reports.insert(reports.end(), r.begin(), r.end());
    }

    auto csv = open_out(opts, "report.csv");
    write_report_csv(csv, reports);
    write_report_csv(std::cout, reports);

    const bool any_fail = std::any_of(reports.begin(), reports.end(), [](const BoundReport& r) {
        return r.asserted && r.verdict == Verdict::fail;
    });
    return any_fail ? kExitVerifyFail : kExitOk;
}

int run_guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const GridError& e) {
        std::cerr << "grid error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}

}  // namespace fspde
