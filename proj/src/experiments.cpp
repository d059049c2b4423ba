#include "biviso/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <ostream>
#include <thread>

#include "biviso/audit.hpp"
#include "biviso/rng.hpp"

namespace biviso {

namespace {

std::uint64_t noise_bits(double v) { return std::bit_cast<std::uint64_t>(v); }

std::vector<double> sorted_covariates(Rng& rng, std::size_t n) {
    std::vector<double> z(n);
    for (double& v : z) v = rng.uniform(0.0, 100.0);
    std::sort(z.begin(), z.end());
    return z;
}

// Runs body(rep) for every replication; worker count never changes which
// rep writes which slot, so aggregation order is fixed.
template <typename F>
void for_each_rep(int reps, int jobs, F&& body) {
    if (jobs <= 1 || reps <= 1) {
        for (int r = 0; r < reps; ++r) body(r);
        return;
    }
    std::atomic<int> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto worker = [&] {
        for (int r = next.fetch_add(1); r < reps; r = next.fetch_add(1)) {
            try {
                body(r);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    int count = std::min(jobs, reps);
    pool.reserve(count);
    for (int t = 0; t < count; ++t) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

ChainSample gen_qes_data(std::uint64_t seed, std::size_t n, double sigma, int rep) {
    Rng rng(derive_seed(seed, "qes-data", n, noise_bits(sigma), static_cast<std::uint64_t>(rep)));
    std::vector<double> z = sorted_covariates(rng, n);
    std::vector<double> y(n);
    for (std::size_t k = 0; k < n; ++k) y[k] = z[k] + rng.normal(0.0, sigma);
    return ChainSample(std::move(z), std::move(y));
}

ChainSample gen_meanvar_data(std::uint64_t seed, std::size_t n, double c, int rep,
                             NoiseScale scale) {
    Rng rng(
        derive_seed(seed, "meanvar-data", n, noise_bits(c), static_cast<std::uint64_t>(rep)));
    std::vector<double> z = sorted_covariates(rng, n);
    std::vector<double> y(n);
    double root_n = std::sqrt(static_cast<double>(n));
    for (std::size_t k = 0; k < n; ++k) {
        double level = c * static_cast<double>(k + 1) / root_n;
        double sd = scale == NoiseScale::Variance ? std::sqrt(level) : level;
        y[k] = z[k] + rng.normal(0.0, sd);
    }
    return ChainSample(std::move(z), std::move(y));
}

namespace {

ChainSample cell_data(const StudyConfig& cfg, const std::string& pair_name, std::size_t n,
                      double noise, int rep) {
    if (pair_name == "qes") return gen_qes_data(cfg.seed, n, noise, rep);
    if (pair_name == "meanvar")
        return gen_meanvar_data(cfg.seed, n, noise, rep, cfg.noise_scale);
    throw DomainError("unknown pair: " + pair_name);
}

PairKind cell_pair(const std::string& pair_name, double alpha) {
    if (pair_name == "qes") return PairKind::quantile_es(alpha);
    if (pair_name == "meanvar") return PairKind::mean_variance();
    throw DomainError("unknown pair: " + pair_name);
}

}  // namespace

StudyResult run_simultaneity_study(const StudyConfig& cfg, const std::string& pair_name,
                                   const std::vector<std::size_t>& ns,
                                   const std::vector<double>& noises,
                                   const std::vector<double>& alphas) {
    std::vector<double> levels = pair_name == "qes" ? alphas : std::vector<double>{0.0};
    if (levels.empty()) throw EmptyInputError("quantile studies need alpha levels");

    StudyResult out;
    for (std::size_t n : ns) {
        for (double noise : noises) {
            for (double alpha : levels) {
                PairKind pair = cell_pair(pair_name, alpha);
                std::vector<char> passed(cfg.replications, 0);
                for_each_rep(cfg.replications, cfg.jobs, [&](int rep) {
                    ChainSample sample = cell_data(cfg, pair_name, n, noise, rep);
                    SimultaneityReport report = check_simultaneous(sample, pair);
                    passed[rep] = report.simultaneous ? 1 : 0;
                });
                StudyCellResult cell;
                cell.key = {pair_name, n, noise, alpha, ""};
                cell.replications = cfg.replications;
                for (char p : passed)
                    if (!p) ++cell.failures;
                cell.value = cfg.replications == 0
                                 ? 0.0
                                 : static_cast<double>(cfg.replications - cell.failures) /
                                       cfg.replications;
                out.cells.push_back(std::move(cell));
            }
        }
    }
    return out;
}

StudyResult run_iteration_study(const StudyConfig& cfg, const std::string& pair_name,
                                const std::vector<std::string>& weight_fns,
                                const std::vector<std::size_t>& ns,
                                const std::vector<double>& noises,
                                const std::vector<double>& alphas) {
    std::vector<double> levels = pair_name == "qes" ? alphas : std::vector<double>{0.0};
    if (levels.empty()) throw EmptyInputError("quantile studies need alpha levels");
    if (weight_fns.empty()) throw EmptyInputError("iteration studies need weight functions");

    StudyResult out;
    for (const std::string& wf : weight_fns) {
        WeightFunction w = WeightFunction::by_name(wf);
        for (std::size_t n : ns) {
            for (double noise : noises) {
                for (double alpha : levels) {
                    PairKind pair = cell_pair(pair_name, alpha);
                    std::vector<int> iters(cfg.replications, 0);
                    std::vector<char> bad(cfg.replications, 0);
                    std::vector<char> clamp(cfg.replications, 0);
                    for_each_rep(cfg.replications, cfg.jobs, [&](int rep) {
                        ChainSample sample = cell_data(cfg, pair_name, n, noise, rep);
                        BivariateFit fit =
                            alternating_solve(sample, pair, w, cfg.convergence);
                        iters[rep] = fit.iterations;
                        bad[rep] = fit.converged ? 0 : 1;
                        clamp[rep] = fit.clamp_events > 0 ? 1 : 0;
                    });
                    StudyCellResult cell;
                    cell.key = {pair_name, n, noise, alpha, wf};
                    cell.replications = cfg.replications;
                    double total = 0.0;
                    for (int it : iters) total += it;
                    for (char b : bad)
                        if (b) ++cell.failures;
                    for (char c2 : clamp)
                        if (c2) ++cell.clamped;
                    cell.value = cfg.replications == 0 ? 0.0 : total / cfg.replications;
                    out.cells.push_back(std::move(cell));
                }
            }
        }
    }
    return out;
}

namespace {

std::string fmt_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

void write_table_csv(const StudyResult& result, std::ostream& os) {
    os << "pair,n,noise,alpha,weight_fn,value,replications,failures\n";
    for (const StudyCellResult& cell : result.cells) {
        os << cell.key.pair << ',' << cell.key.n << ',' << fmt_g(cell.key.noise) << ','
           << fmt_g(cell.key.alpha) << ',' << cell.key.weight_fn << ',' << fmt_g(cell.value)
           << ',' << cell.replications << ',' << cell.failures << '\n';
    }
}

void write_table_text(const StudyResult& result, std::ostream& os) {
    // Blocks keyed by (weight_fn, n) in first-seen order; quantile studies
    // pivot noise rows against alpha columns, others pivot n against noise.
    bool has_alpha = false;
    for (const StudyCellResult& cell : result.cells)
        if (cell.key.pair == "qes") has_alpha = true;

    if (has_alpha) {
        std::vector<std::pair<std::string, std::size_t>> blocks;
        for (const StudyCellResult& cell : result.cells) {
            std::pair<std::string, std::size_t> b{cell.key.weight_fn, cell.key.n};
            if (std::find(blocks.begin(), blocks.end(), b) == blocks.end())
                blocks.push_back(b);
        }
        for (const auto& block : blocks) {
            std::vector<double> alphas, noises;
            for (const StudyCellResult& cell : result.cells) {
                if (cell.key.weight_fn != block.first || cell.key.n != block.second) continue;
                if (std::find(alphas.begin(), alphas.end(), cell.key.alpha) == alphas.end())
                    alphas.push_back(cell.key.alpha);
                if (std::find(noises.begin(), noises.end(), cell.key.noise) == noises.end())
                    noises.push_back(cell.key.noise);
            }
            os << "n=" << block.second;
            if (!block.first.empty()) os << " weight=" << block.first;
            os << '\n';
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%10s", "noise\\a");
            os << buf;
            for (double a : alphas) {
                std::snprintf(buf, sizeof(buf), "%10.3g", a);
                os << buf;
            }
            os << '\n';
            for (double noise : noises) {
                std::snprintf(buf, sizeof(buf), "%10.3g", noise);
                os << buf;
                for (double a : alphas) {
                    for (const StudyCellResult& cell : result.cells) {
                        if (cell.key.weight_fn == block.first && cell.key.n == block.second &&
                            cell.key.noise == noise && cell.key.alpha == a) {
                            std::snprintf(buf, sizeof(buf), "%10.2f", cell.value);
                            os << buf;
                        }
                    }
                }
                os << '\n';
            }
            os << '\n';
        }
        return;
    }

    std::vector<std::string> wfs;
    for (const StudyCellResult& cell : result.cells)
        if (std::find(wfs.begin(), wfs.end(), cell.key.weight_fn) == wfs.end())
            wfs.push_back(cell.key.weight_fn);
    for (const std::string& wf : wfs) {
        std::vector<std::size_t> ns;
        std::vector<double> noises;
        for (const StudyCellResult& cell : result.cells) {
            if (cell.key.weight_fn != wf) continue;
            if (std::find(ns.begin(), ns.end(), cell.key.n) == ns.end())
                ns.push_back(cell.key.n);
            if (std::find(noises.begin(), noises.end(), cell.key.noise) == noises.end())
                noises.push_back(cell.key.noise);
        }
        if (!wf.empty()) os << "weight=" << wf << '\n';
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%10s", "n\\noise");
        os << buf;
        for (double c : noises) {
            std::snprintf(buf, sizeof(buf), "%10.3g", c);
            os << buf;
        }
        os << '\n';
        for (std::size_t n : ns) {
            std::snprintf(buf, sizeof(buf), "%10zu", n);
            os << buf;
            for (double c : noises) {
                for (const StudyCellResult& cell : result.cells) {
                    if (cell.key.weight_fn == wf && cell.key.n == n &&
                        cell.key.noise == c) {
                        std::snprintf(buf, sizeof(buf), "%10.2f", cell.value);
                        os << buf;
                    }
                }
            }
            os << '\n';
        }
        os << '\n';
    }
}

}  // namespace biviso
