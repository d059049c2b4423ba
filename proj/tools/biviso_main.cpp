// Command line front end: fit, audit, simulate, poset-fit.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "biviso/audit.hpp"
#include "biviso/csv.hpp"
#include "biviso/errors.hpp"
#include "biviso/experiments.hpp"
#include "biviso/joint.hpp"
#include "biviso/poset.hpp"
#include "biviso/version.hpp"

namespace {

using nlohmann::json;

constexpr int kExitBadInput = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitTooLarge = 4;

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

struct Manifest {
    std::string command;
    std::optional<std::uint64_t> seed;
    json config = json::object();
    std::map<std::string, std::string> input_digests;
    std::vector<std::string> warnings;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    void digest(const std::string& path) {
        input_digests[path] = hex64(fnv1a64(biviso::read_text_file(path)));
    }

    void write(const std::filesystem::path& out_dir) const {
        json j;
        j["command"] = command;
        j["version"] = biviso::kVersion;
        if (seed)
            j["seed"] = *seed;
        else
            j["seed"] = nullptr;
        j["config"] = config;
        j["inputs"] = input_digests;
        j["wall_clock_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        j["warnings"] = warnings;
        std::ofstream os(out_dir / "manifest.json");
        os << j.dump(2) << '\n';
    }
};

std::string join_args(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

// env > flag > config > fallback
std::uint64_t effective_seed(const std::optional<std::uint64_t>& flag,
                             const std::optional<std::uint64_t>& config, std::uint64_t fallback,
                             std::vector<std::string>& warnings) {
    if (const char* env = std::getenv("BIVISO_SEED")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && end != env) {
            if (flag || config) warnings.push_back("BIVISO_SEED overrides the configured seed");
            return v;
        }
        warnings.push_back(std::string("ignoring non-numeric BIVISO_SEED='") + env + "'");
    }
    if (flag) return *flag;
    if (config) return *config;
    return fallback;
}

biviso::PairKind make_pair(const std::string& name, const std::optional<double>& alpha,
                           std::vector<std::string>& warnings) {
    if (name == "qes") {
        if (!alpha) throw biviso::DomainError("--alpha is required when --pair is qes");
        return biviso::PairKind::quantile_es(*alpha);
    }
    if (name == "meanvar") {
        if (alpha) warnings.push_back("--alpha is ignored for pair=meanvar");
        return biviso::PairKind::mean_variance();
    }
    throw biviso::DomainError("unknown pair: " + name);
}

std::string resolve_weight(const std::string& name, const biviso::PairKind& pair) {
    if (name == "canonical") return "constant";
    if (name == "h1") return pair.is_quantile_es() ? "h1_es" : "h1_var";
    if (name == "h2") return pair.is_quantile_es() ? "h2_es" : "h2_var";
    return name;
}

void write_murphy_csv(const std::filesystem::path& path, const biviso::MurphyCurves& curves) {
    std::ofstream os(path);
    os << "eta,fit_id,s1_mean,s2_mean\n";
    char buf[192];
    for (std::size_t f = 0; f < curves.fit_ids.size(); ++f) {
        for (std::size_t e = 0; e < curves.etas.size(); ++e) {
            std::snprintf(buf, sizeof(buf), "%.12g,%s,%.12g,%.12g\n", curves.etas[e],
                          curves.fit_ids[f].c_str(), curves.s1[f][e], curves.s2[f][e]);
            os << buf;
        }
    }
}

const char* verdict_name(biviso::DominanceVerdict v) {
    switch (v) {
        case biviso::DominanceVerdict::ADominates: return "a_dominates";
        case biviso::DominanceVerdict::BDominates: return "b_dominates";
        case biviso::DominanceVerdict::Equal: return "equal";
        case biviso::DominanceVerdict::Crossing: return "crossing";
    }
    return "unknown";
}

json chain_report_json(const biviso::SimultaneityReport& report) {
    json j;
    j["simultaneous"] = report.simultaneous;
    j["tolerance"] = report.tolerance;
    j["mode"] = report.mode == biviso::TriggerMode::Proposition ? "proposition" : "prose";
    j["g1"] = report.g1.values;
    j["g2"] = report.g2.values;
    j["checks"] = json::array();
    for (const biviso::BreakpointCheck& c : report.checks) {
        json cj;
        cj["m"] = c.m;
        cj["g2_jump"] = c.g2_jump;
        cj["side"] = c.side == biviso::TailSide::Suffix ? "suffix" : "prefix";
        cj["restricted_loss"] = c.restricted_loss;
        cj["refit_loss"] = c.refit_loss;
        cj["passed"] = c.passed;
        cj["refit_values"] = c.refit_values;
        j["checks"].push_back(std::move(cj));
    }
    return j;
}

struct FitOptions {
    std::string data_path;
    std::string pair_name = "qes";
    std::optional<double> alpha;
    std::string weight = "canonical";
    std::string out_dir = ".";
    int eta_points = 401;
    bool murphy = false;
    int max_iterations = 200;
    double tolerance = 1e-10;
};

int run_fit(const FitOptions& opt, Manifest& manifest) {
    namespace fs = std::filesystem;
    fs::create_directories(opt.out_dir);
    manifest.digest(opt.data_path);

    biviso::XYData data = biviso::read_xy_csv_file(opt.data_path);
    biviso::ChainSample sample(data.z, data.y);
    biviso::PairKind pair = make_pair(opt.pair_name, opt.alpha, manifest.warnings);

    manifest.config["pair"] = pair.name();
    manifest.config["weight"] = opt.weight;
    manifest.config["eta_points"] = opt.eta_points;
    manifest.config["max_iterations"] = opt.max_iterations;
    manifest.config["tolerance"] = opt.tolerance;

    biviso::BivariateFit fit;
    biviso::BivariateFit canonical = biviso::canonical_pair(sample, pair);
    if (opt.weight == "canonical") {
        fit = canonical;
    } else {
        biviso::WeightFunction w =
            biviso::WeightFunction::by_name(resolve_weight(opt.weight, pair));
        biviso::ConvergenceConfig cfg;
        cfg.max_iterations = opt.max_iterations;
        cfg.loss_tolerance = opt.tolerance;
        fit = biviso::alternating_solve(sample, pair, w, cfg);
        manifest.config["weight_fn"] = w.name();
    }
    manifest.config["iterations"] = fit.iterations;
    manifest.config["converged"] = fit.converged;
    if (!fit.converged)
        manifest.warnings.push_back("alternating pass stopped at the iteration cap");

    std::vector<double> zs(sample.size());
    for (std::size_t k = 0; k < sample.size(); ++k) zs[k] = sample.z(k);
    {
        std::ofstream os(fs::path(opt.out_dir) / "fit.csv");
        biviso::write_fit_csv(os, zs, fit.g1.values, fit.g2.values);
    }

    if (opt.murphy) {
        std::vector<biviso::FitPair> fits;
        fits.push_back({"canonical", canonical.g1.values, canonical.g2.values});
        if (opt.weight != "canonical")
            fits.push_back({fit.weight_name, fit.g1.values, fit.g2.values});
        biviso::EtaGrid grid =
            biviso::default_murphy_grid(sample, pair, fits, opt.eta_points);
        biviso::MurphyCurves curves = biviso::murphy_curves(sample, pair, fits, grid);
        write_murphy_csv(fs::path(opt.out_dir) / "murphy.csv", curves);
        if (fits.size() == 2) {
            json dj;
            dj["a"] = curves.fit_ids[0];
            dj["b"] = curves.fit_ids[1];
            dj["verdict"] = verdict_name(biviso::dominance(curves, 0, 1));
            manifest.config["dominance"] = dj;
        }
    }

    manifest.write(opt.out_dir);
    return fit.converged ? 0 : kExitNoConvergence;
}

struct AuditOptions {
    std::string data_path;
    std::string pair_name = "qes";
    std::optional<double> alpha;
    std::string out_dir = ".";
    int eta_points = 401;
    bool prose = false;
    double tolerance = 1e-9;
};

int run_audit(const AuditOptions& opt, Manifest& manifest) {
    namespace fs = std::filesystem;
    fs::create_directories(opt.out_dir);
    manifest.digest(opt.data_path);

    biviso::XYData data = biviso::read_xy_csv_file(opt.data_path);
    biviso::ChainSample sample(data.z, data.y);
    biviso::PairKind pair = make_pair(opt.pair_name, opt.alpha, manifest.warnings);
    biviso::TriggerMode mode =
        opt.prose ? biviso::TriggerMode::Prose : biviso::TriggerMode::Proposition;

    manifest.config["pair"] = pair.name();
    manifest.config["mode"] = opt.prose ? "prose" : "proposition";
    manifest.config["tolerance"] = opt.tolerance;

    biviso::SimultaneityReport report =
        biviso::check_simultaneous(sample, pair, opt.tolerance, mode);
    json j = chain_report_json(report);
    j["pair"] = pair.name();

    std::vector<biviso::FitPair> fits;
    fits.push_back({"canonical", report.g1.values, report.g2.values});
    for (const biviso::BreakpointCheck& c : report.checks)
        if (!c.passed) fits.push_back(biviso::refit_competitor(sample, pair, report, c));
    biviso::EtaGrid grid = biviso::default_murphy_grid(sample, pair, fits, opt.eta_points);
    biviso::MurphyCurves curves = biviso::murphy_curves(sample, pair, fits, grid);
    write_murphy_csv(fs::path(opt.out_dir) / "murphy.csv", curves);
    j["dominance"] = json::array();
    for (std::size_t f = 1; f < fits.size(); ++f) {
        json dj;
        dj["competitor"] = curves.fit_ids[f];
        dj["verdict"] = verdict_name(biviso::dominance(curves, 0, f));
        j["dominance"].push_back(std::move(dj));
    }

    {
        std::ofstream os(fs::path(opt.out_dir) / "audit.json");
        os << j.dump(2) << '\n';
    }
    manifest.write(opt.out_dir);
    return 0;
}

struct SimulateOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed_flag;
    std::optional<int> jobs_flag;
};

int run_simulate(const SimulateOptions& opt, Manifest& manifest) {
    namespace fs = std::filesystem;
    using biviso::StudyConfig;
    fs::create_directories(opt.out_dir);
    manifest.digest(opt.config_path);

    json cfg = json::parse(biviso::read_text_file(opt.config_path));
    static const std::vector<std::string> known = {
        "study",        "pair", "n_values", "noise_values", "alpha_values",
        "weight_fns", "replications", "seed", "jobs", "noise_scale"};
    std::string unknown;
    for (const auto& item : cfg.items()) {
        if (std::find(known.begin(), known.end(), item.key()) == known.end())
            unknown += (unknown.empty() ? "" : ", ") + item.key();
    }
    if (!unknown.empty())
        throw biviso::DomainError("unknown config keys: " + unknown);

    std::string study = cfg.at("study").get<std::string>();
    std::string pair = cfg.at("pair").get<std::string>();

    StudyConfig sc;
    std::optional<std::uint64_t> config_seed;
    if (cfg.contains("seed")) config_seed = cfg["seed"].get<std::uint64_t>();
    sc.seed = effective_seed(opt.seed_flag, config_seed, sc.seed, manifest.warnings);
    if (cfg.contains("replications")) sc.replications = cfg["replications"].get<int>();
    sc.jobs = opt.jobs_flag ? *opt.jobs_flag
                            : (cfg.contains("jobs") ? cfg["jobs"].get<int>() : 1);
    if (cfg.contains("noise_scale")) {
        std::string ns = cfg["noise_scale"].get<std::string>();
        if (ns == "variance")
            sc.noise_scale = biviso::NoiseScale::Variance;
        else if (ns == "sd")
            sc.noise_scale = biviso::NoiseScale::Sd;
        else
            throw biviso::DomainError("noise_scale must be 'variance' or 'sd'");
    }

    auto sizes = cfg.value("n_values", std::vector<std::size_t>{});
    auto noises = cfg.value("noise_values", std::vector<double>{});
    auto alphas = cfg.value("alpha_values", std::vector<double>{});
    auto weights = cfg.value("weight_fns", std::vector<std::string>{});

    manifest.seed = sc.seed;
    manifest.config = cfg;
    manifest.config["effective_seed"] = sc.seed;
    manifest.config["effective_jobs"] = sc.jobs;

    biviso::StudyResult result;
    if (study == "simultaneity")
        result = biviso::run_simultaneity_study(sc, pair, sizes, noises, alphas);
    else if (study == "iterations")
        result = biviso::run_iteration_study(sc, pair, weights, sizes, noises, alphas);
    else
        throw biviso::DomainError("study must be 'simultaneity' or 'iterations'");

    {
        std::ofstream os(fs::path(opt.out_dir) / "table.csv");
        biviso::write_table_csv(result, os);
    }
    {
        std::ofstream os(fs::path(opt.out_dir) / "table.txt");
        biviso::write_table_text(result, os);
    }
    manifest.write(opt.out_dir);
    return 0;
}

struct PosetOptions {
    std::string data_path;
    std::string edges_path;
    std::string pair_name = "qes";
    std::optional<double> alpha;
    std::string out_dir = ".";
    double tolerance = 1e-9;
};

int run_poset_fit(const PosetOptions& opt, Manifest& manifest) {
    namespace fs = std::filesystem;
    fs::create_directories(opt.out_dir);
    manifest.digest(opt.data_path);
    manifest.digest(opt.edges_path);

    auto rows = biviso::read_node_csv_file(opt.data_path);
    std::vector<std::string> names;
    std::vector<std::vector<double>> pooled;
    for (const auto& row : rows) {
        auto it = std::find(names.begin(), names.end(), row.first);
        if (it == names.end()) {
            names.push_back(row.first);
            pooled.push_back({row.second});
        } else {
            pooled[static_cast<std::size_t>(it - names.begin())].push_back(row.second);
        }
    }
    std::vector<biviso::WeightedSample> obs;
    obs.reserve(pooled.size());
    for (auto& vals : pooled) obs.emplace_back(std::move(vals));

    auto edges = biviso::parse_edge_list(biviso::read_text_file(opt.edges_path));
    biviso::PosetSample poset = biviso::PosetSample::make(names, edges, std::move(obs));
    biviso::PairKind pair = make_pair(opt.pair_name, opt.alpha, manifest.warnings);

    manifest.config["pair"] = pair.name();
    manifest.config["nodes"] = poset.size();
    manifest.config["tolerance"] = opt.tolerance;

    biviso::PosetSimultaneityReport report =
        biviso::poset_check_simultaneous(poset, pair, opt.tolerance);

    {
        std::ofstream os(fs::path(opt.out_dir) / "fit.csv");
        os << "node,g1,g2\n";
        char buf[192];
        for (std::size_t k = 0; k < poset.size(); ++k) {
            std::snprintf(buf, sizeof(buf), "%s,%.12g,%.12g\n", poset.node(k).c_str(),
                          report.g1[k], report.g2[k]);
            os << buf;
        }
    }

    json j;
    j["pair"] = pair.name();
    j["simultaneous"] = report.simultaneous;
    j["tolerance"] = report.tolerance;
    j["is_chain"] = report.is_chain;
    j["chain_agrees_with_total_order"] = report.chain_agrees_with_total_order;
    j["g1"] = report.g1;
    j["g2"] = report.g2;
    j["checks"] = json::array();
    for (const biviso::PosetRegionCheck& c : report.checks) {
        json cj;
        cj["region_nodes"] = c.region_nodes;
        cj["g2_level"] = c.g2_level;
        cj["restricted_loss"] = c.restricted_loss;
        cj["refit_loss"] = c.refit_loss;
        cj["passed"] = c.passed;
        cj["refit_values"] = c.refit_values;
        j["checks"].push_back(std::move(cj));
    }
    {
        std::ofstream os(fs::path(opt.out_dir) / "audit.json");
        os << j.dump(2) << '\n';
    }
    manifest.write(opt.out_dir);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monotone regression toolkit for functional/risk pairs"};
    app.set_version_flag("--version", biviso::kVersion);
    app.require_subcommand(1);

    FitOptions fit_opt;
    CLI::App* fit = app.add_subcommand("fit", "Fit a monotone pair to z,y data");
    fit->add_option("--data", fit_opt.data_path, "input CSV with header z,y")->required();
    fit->add_option("--pair", fit_opt.pair_name, "qes or meanvar");
    fit->add_option("--alpha", fit_opt.alpha, "quantile level");
    fit->add_option("--weight", fit_opt.weight, "canonical, h1, h2, or a full name");
    fit->add_option("--out", fit_opt.out_dir, "output directory");
    fit->add_option("--eta-points", fit_opt.eta_points, "murphy grid resolution");
    fit->add_flag("--murphy", fit_opt.murphy, "also write murphy.csv");
    fit->add_option("--max-iterations", fit_opt.max_iterations, "alternating cycle cap");
    fit->add_option("--tolerance", fit_opt.tolerance, "loss improvement cutoff");

    AuditOptions audit_opt;
    CLI::App* audit = app.add_subcommand("audit", "Check simultaneous optimality");
    audit->add_option("--data", audit_opt.data_path, "input CSV with header z,y")->required();
    audit->add_option("--pair", audit_opt.pair_name, "qes or meanvar");
    audit->add_option("--alpha", audit_opt.alpha, "quantile level");
    audit->add_option("--out", audit_opt.out_dir, "output directory");
    audit->add_option("--eta-points", audit_opt.eta_points, "murphy grid resolution");
    audit->add_flag("--prose", audit_opt.prose, "check every risk jump");
    audit->add_option("--tolerance", audit_opt.tolerance, "loss comparison tolerance");

    SimulateOptions sim_opt;
    std::uint64_t sim_seed = 0;
    int sim_jobs = 0;
    CLI::App* sim = app.add_subcommand("simulate", "Run a replicated study");
    sim->add_option("--config", sim_opt.config_path, "study config JSON")->required();
    sim->add_option("--out", sim_opt.out_dir, "output directory");
    CLI::Option* seed_opt = sim->add_option("--seed", sim_seed, "base seed");
    CLI::Option* jobs_opt = sim->add_option("--jobs", sim_jobs, "worker threads");

    PosetOptions poset_opt;
    CLI::App* poset = app.add_subcommand("poset-fit", "Fit over a partial order");
    poset->add_option("--data", poset_opt.data_path, "input CSV with header node,y")
        ->required();
    poset->add_option("--edges", poset_opt.edges_path, "precedence edge list")->required();
    poset->add_option("--pair", poset_opt.pair_name, "qes or meanvar");
    poset->add_option("--alpha", poset_opt.alpha, "quantile level");
    poset->add_option("--out", poset_opt.out_dir, "output directory");
    poset->add_option("--tolerance", poset_opt.tolerance, "loss comparison tolerance");

    CLI11_PARSE(app, argc, argv);

    Manifest manifest;
    manifest.command = join_args(argc, argv);

    try {
        if (*fit) return run_fit(fit_opt, manifest);
        if (*audit) return run_audit(audit_opt, manifest);
        if (*sim) {
            if (seed_opt->count()) sim_opt.seed_flag = sim_seed;
            if (jobs_opt->count()) sim_opt.jobs_flag = sim_jobs;
            return run_simulate(sim_opt, manifest);
        }
        if (*poset) return run_poset_fit(poset_opt, manifest);
    } catch (const biviso::ParseError& e) {
        std::cerr << "error: line " << e.line << ": " << e.what() << '\n';
        return kExitBadInput;
    } catch (const biviso::TooLargeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitTooLarge;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
