// Command-line front end: path fitting and tuning-parameter selection on
// CSV data, simulation studies, tracker benchmarks, oracle verification,
// and bit-exact replay from a run manifest.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gpsselect/criteria.hpp"
#include "gpsselect/dataset.hpp"
#include "gpsselect/dof.hpp"
#include "gpsselect/oracle.hpp"
#include "gpsselect/path.hpp"
#include "gpsselect/penalty.hpp"
#include "gpsselect/sim.hpp"
#include "gpsselect/version.hpp"

using json = nlohmann::json;
using namespace gps;

namespace {

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open file for digest: " + path);
    std::uint64_t h = 0xcbf29ce484222325ull;
    char buf[1 << 15];
    while (in) {
        in.read(buf, sizeof(buf));
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ull;
        }
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void write_output(const json& doc, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        std::cout << doc.dump(2) << "\n";
    } else {
        std::ofstream f(out_path);
        if (!f) throw input_error("cannot write output file: " + out_path);
        f << doc.dump(2) << "\n";
    }
}

void write_text(const std::string& text, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
    } else {
        std::ofstream f(out_path);
        if (!f) throw input_error("cannot write output file: " + out_path);
        f << text;
    }
}

PenaltySpec penalty_from_name(const std::string& name, double alpha) {
    if (name == "lasso") return PenaltySpec::lasso();
    if (name == "enet") return PenaltySpec::elastic_net(alpha);
    if (name == "genet") return PenaltySpec::gen_elastic_net(alpha);
    throw input_error("unknown penalty '" + name + "' (expected lasso|enet|genet)");
}

double json_or_null(double v) { return v; }  // nlohmann serializes non-finite as null

// ---------------------------------------------------------------------------
// fit

struct FitArgs {
    std::string data;
    std::string response = "y";
    std::string penalty = "lasso";
    double alpha = 0.5;
    int steps = 20000;
    double delta_t = 0.0;
    int max_vars = 0;
    std::vector<std::string> criteria{"cp"};
    std::string tau2 = "auto";
    std::string df_mode = "reduced";
    int thin = 10;
    std::uint64_t seed = 1;
    int folds = 10;
    std::string aicc_form = "plus";
    std::string trace_var;
    std::string plot_data;
    std::string out;
    std::string format = "json";
};

std::vector<std::string> expand_criteria(const std::vector<std::string>& in) {
    std::vector<std::string> out;
    for (const auto& c : in) {
        if (c == "all") {
            for (const char* k : {"cp", "aic", "aicc", "bic", "gcv", "cv"}) out.push_back(k);
        } else {
            out.push_back(c);
        }
    }
    std::vector<std::string> dedup;
    for (const auto& c : out)
        if (std::find(dedup.begin(), dedup.end(), c) == dedup.end()) dedup.push_back(c);
    return dedup;
}

json manifest_base(const std::string& command) {
    json m;
    m["command"] = command;
    m["version"] = kVersion;
    return m;
}

int resolve_trace_var(const std::string& spec, const std::vector<std::string>& names) {
    if (spec.empty()) return -1;
    for (std::size_t j = 0; j < names.size(); ++j)
        if (names[j] == spec) return static_cast<int>(j);
    try {
        std::size_t pos = 0;
        int idx = std::stoi(spec, &pos);
        if (pos == spec.size() && idx >= 1 && idx <= static_cast<int>(names.size()))
            return idx - 1;  // 1-based on the command line
    } catch (...) {
    }
    throw input_error("--trace-var '" + spec + "' matches no predictor");
}

int run_fit(const FitArgs& a) {
    auto t_start = std::chrono::steady_clock::now();
    auto criteria = expand_criteria(a.criteria);
    for (const auto& c : criteria)
        if (c != "cv") (void)criterion_from_string(c);

    RawDataset raw = load_csv(a.data, a.response);
    StandardizedDesign design = standardize(raw);
    PenaltySpec penalty = penalty_from_name(a.penalty, a.alpha);
    validate(penalty);

    PathOptions opts;
    opts.step_budget = a.steps;
    opts.delta_t = a.delta_t;
    opts.max_vars = a.max_vars;

    int trace_idx = resolve_trace_var(a.trace_var, design.names);

    // tau2: numeric, "auto", or absent when auto-estimation is impossible
    std::optional<double> tau2;
    std::string tau2_mode;
    if (a.tau2 == "auto") {
        tau2_mode = "auto";
        try {
            tau2 = estimate_tau2(design).value;
        } catch (const numerical_error&) {
            bool needed = false;
            for (const auto& c : criteria)
                if (c == "cp" || c == "aic" || c == "bic") needed = true;
            if (needed) throw;
        }
    } else {
        tau2_mode = "given";
        tau2 = std::stod(a.tau2);
        if (!(*tau2 > 0.0)) throw input_error("--tau2 must be positive");
    }

    SolutionPath path = fit(design, penalty, opts);
    AiccForm aicc_form = a.aicc_form == "literal" ? AiccForm::Literal : AiccForm::PlusPenalty;

    DfSeries dfs, dfs_dense;
    bool have_dense = false;
    if (a.df_mode == "dense") {
        dfs = dense_df_series(path, design);
    } else if (a.df_mode == "both") {
        dfs = reduced_replay(path, design);
        dfs_dense = dense_df_series(path, design);
        have_dense = true;
    } else {
        dfs = reduced_replay(path, design);
    }
    auto zou = zou_df_series(path);
    CriterionTable table = evaluate(path, dfs, tau2, aicc_form);

    // selections
    json selections = json::object();
    std::vector<std::size_t> marked_steps;
    for (const auto& cname : criteria) {
        json s;
        Vec beta_std;
        if (cname == "cv") {
            CvResult cv = cross_validate(raw, penalty, opts, a.folds, a.seed);
            s["s"] = cv.chosen_s;
            s["cv_error"] = cv.mean_error[static_cast<std::size_t>(
                std::llround(cv.chosen_s * 100.0))];
            s["step"] = cv.chosen_step;
            s["t"] = cv.path.steps[cv.chosen_step].t;
            s["l1"] = cv.path.steps[cv.chosen_step].l1;
            s["df"] = dfs[std::min(cv.chosen_step, dfs.size() - 1)];
            beta_std = cv.beta_std;
            s["intercept"] = cv.intercept;
            s["intercept_raw"] = cv.intercept_raw;
            marked_steps.push_back(cv.chosen_step);
        } else {
            auto sel = select(path, table, criterion_from_string(cname), design);
            s["step"] = sel.step;
            s["t"] = sel.t;
            s["l1"] = sel.l1;
            s["df"] = sel.df;
            s["criterion_value"] = json_or_null(sel.criterion_value);
            beta_std = sel.beta_std;
            s["intercept"] = sel.intercept;
            s["intercept_raw"] = sel.intercept_raw;
            marked_steps.push_back(sel.step);
        }
        auto [b0, braw] = destandardize(beta_std, design);
        json coef = json::object(), coef_raw = json::object();
        for (Eigen::Index j = 0; j < design.p(); ++j) {
            coef[design.names[static_cast<std::size_t>(j)]] = beta_std[j];
            coef_raw[design.names[static_cast<std::size_t>(j)]] = braw[j];
        }
        s["coef"] = coef;
        s["coef_raw"] = coef_raw;
        selections[cname] = s;
    }

    // thinned step grid: every thin-th step, the selected steps, and the end
    std::vector<bool> emit(path.steps.size(), false);
    for (std::size_t i = 0; i < path.steps.size(); i += std::max(1, a.thin)) emit[i] = true;
    emit.front() = true;
    emit.back() = true;
    for (auto s : marked_steps)
        if (s < emit.size()) emit[s] = true;

    // optional gradient trace of one coordinate, replayed via gram updates
    Vec trace_g;
    if (trace_idx >= 0) {
        trace_g.resize(static_cast<Eigen::Index>(path.steps.size()));
        Vec gram_row = design.x.transpose() * design.x.col(trace_idx);
        double gj = 2.0 * design.x.col(trace_idx).dot(design.y) / static_cast<double>(design.n());
        trace_g[0] = gj;
        for (std::size_t i = 1; i < path.steps.size(); ++i) {
            const auto& rec = path.steps[i];
            double sgn = rec.g_k > 0 ? 1.0 : -1.0;
            gj -= 2.0 * path.delta_t * sgn / static_cast<double>(design.n()) * gram_row[rec.k];
            trace_g[static_cast<Eigen::Index>(i)] = gj;
        }
    }

    json steps = json::array();
    {
        std::vector<long> n_of(static_cast<std::size_t>(path.p), 0);
        for (std::size_t i = 0; i < path.steps.size(); ++i) {
            if (i > 0) n_of[static_cast<std::size_t>(path.steps[i].k)] = path.steps[i].n_k;
            if (!emit[i]) continue;
            const auto& rec = path.steps[i];
            json row;
            row["step"] = i;
            row["t"] = rec.t;
            row["l1"] = rec.l1;
            row["rss"] = rec.rss;
            row["df"] = dfs[i];
            if (have_dense) row["df_dense"] = dfs_dense[i];
            row["df_zou"] = zou[i];
            json coef = json::object();
            for (Eigen::Index j = 0; j < path.p; ++j) {
                long c = n_of[static_cast<std::size_t>(j)];
                if (c != 0)
                    coef[design.names[static_cast<std::size_t>(j)]] =
                        static_cast<double>(c) * path.delta_t;
            }
            row["coef"] = coef;
            json crit;
            crit["cp"] = json_or_null(table.cp[i]);
            crit["aic"] = json_or_null(table.aic[i]);
            crit["aicc"] = json_or_null(table.aicc[i]);
            crit["bic"] = json_or_null(table.bic[i]);
            crit["gcv"] = json_or_null(table.gcv[i]);
            row["criteria"] = crit;
            if (trace_idx >= 0) row["g_trace"] = trace_g[static_cast<Eigen::Index>(i)];
            steps.push_back(row);
        }
    }

    json doc;
    json manifest = manifest_base("fit");
    json o;
    o["data"] = a.data;
    o["response"] = a.response;
    o["penalty"] = a.penalty;
    o["alpha"] = a.alpha;
    o["steps"] = a.steps;
    o["delta_t"] = a.delta_t;
    o["max_vars"] = a.max_vars;
    o["criteria"] = criteria;
    o["tau2"] = a.tau2;
    o["df"] = a.df_mode;
    o["thin"] = a.thin;
    o["seed"] = a.seed;
    o["folds"] = a.folds;
    o["aicc_form"] = a.aicc_form;
    o["trace_var"] = a.trace_var;
    o["plot_data"] = a.plot_data;
    o["format"] = a.format;
    manifest["options"] = o;
    manifest["inputs"] = {{"data", {{"path", a.data}, {"digest", hex64(fnv1a64_file(a.data))}}}};
    doc["manifest"] = manifest;

    doc["design"] = {{"n", design.n()},
                     {"p", design.p()},
                     {"predictors", design.names},
                     {"response", a.response},
                     {"y_mean", design.y_mean}};
    doc["path"] = {{"delta_t", path.delta_t},
                   {"alpha", path.alpha},
                   {"updates", path.n_updates()},
                   {"q", path.q()},
                   {"stop_reason", path.stop_reason},
                   {"warnings", path.warnings},
                   {"df_note", dfs.note}};
    if (have_dense) {
        double gap = 0.0;
        for (std::size_t i = 0; i < dfs.size(); ++i)
            gap = std::max(gap, std::abs(dfs[i] - dfs_dense[i]));
        doc["path"]["df_dense_vs_reduced_max_gap"] = gap;
    }
    if (tau2)
        doc["tau2"] = {{"mode", tau2_mode}, {"value", *tau2}};
    else
        doc["tau2"] = {{"mode", tau2_mode}, {"value", nullptr}};
    doc["steps"] = steps;
    doc["selections"] = selections;

    // plot data: two-column text files keyed by l1 norm
    if (!a.plot_data.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(a.plot_data);
        auto open_dat = [&](const std::string& name, const std::string& header) {
            std::ofstream f(a.plot_data + "/" + name);
            if (!f) throw input_error("cannot write plot file in " + a.plot_data);
            f << "# " << header << "\n";
            return f;
        };
        {
            std::vector<std::ofstream> files;
            for (Eigen::Index j = 0; j < path.p; ++j)
                files.push_back(open_dat("coef_" + design.names[static_cast<std::size_t>(j)] + ".dat",
                                         "l1 coefficient"));
            std::vector<long> n_of(static_cast<std::size_t>(path.p), 0);
            for (std::size_t i = 0; i < path.steps.size(); ++i) {
                if (i > 0) n_of[static_cast<std::size_t>(path.steps[i].k)] = path.steps[i].n_k;
                if (!emit[i]) continue;
                for (Eigen::Index j = 0; j < path.p; ++j)
                    files[static_cast<std::size_t>(j)]
                        << path.steps[i].l1 << " "
                        << static_cast<double>(n_of[static_cast<std::size_t>(j)]) * path.delta_t
                        << "\n";
            }
        }
        {
            auto f = open_dat("df.dat", "l1 df");
            auto fz = open_dat("df_zou.dat", "l1 nonzero_count");
            for (std::size_t i = 0; i < path.steps.size(); ++i) {
                if (!emit[i]) continue;
                f << path.steps[i].l1 << " " << dfs[i] << "\n";
                fz << path.steps[i].l1 << " " << zou[i] << "\n";
            }
        }
        if (trace_idx >= 0) {
            auto f = open_dat("trace_" + design.names[static_cast<std::size_t>(trace_idx)] + ".dat",
                              "l1 gradient");
            for (std::size_t i = 0; i < path.steps.size(); ++i) {
                if (!emit[i]) continue;
                f << path.steps[i].l1 << " " << trace_g[static_cast<Eigen::Index>(i)] << "\n";
            }
        }
    }

    doc["timing"] = {{"seconds", std::chrono::duration<double>(
                                     std::chrono::steady_clock::now() - t_start)
                                     .count()}};

    if (a.format == "csv") {
        std::ostringstream csv;
        csv << "step,t,l1,rss,df,df_zou,cp,aic,aicc,bic,gcv\n";
        for (const auto& row : steps) {
            csv << row["step"] << "," << row["t"].dump() << "," << row["l1"].dump() << ","
                << row["rss"].dump() << "," << row["df"].dump() << "," << row["df_zou"] << ","
                << row["criteria"]["cp"].dump() << "," << row["criteria"]["aic"].dump() << ","
                << row["criteria"]["aicc"].dump() << "," << row["criteria"]["bic"].dump() << ","
                << row["criteria"]["gcv"].dump() << "\n";
        }
        write_text(csv.str(), a.out);
    } else {
        write_output(doc, a.out);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
    int example = 1;
    int reps = 200;
    std::uint64_t seed = 1;
    std::vector<std::string> penalties{"lasso"};
    double alpha = 0.5;
    std::vector<std::string> criteria{"all"};
    std::string tau2 = "estimated";
    int steps = 20000;
    bool compare_df = false;
    int folds = 10;
    std::string out;
    std::string format = "json";
};

int run_simulate(const SimulateArgs& a) {
    auto t_start = std::chrono::steady_clock::now();
    SimConfig cfg;
    cfg.example = a.example;
    cfg.replicates = a.reps;
    cfg.seed = a.seed;
    cfg.tau2_mode = a.tau2 == "true" ? Tau2Mode::True : Tau2Mode::Estimated;
    if (a.tau2 != "true" && a.tau2 != "estimated")
        throw input_error("--tau2 must be true|estimated for simulate");
    cfg.path_options.step_budget = a.steps;
    cfg.cv_folds = a.folds;

    cfg.penalties.clear();
    for (const auto& p : a.penalties) {
        if (p == "all") {
            cfg.penalties.push_back(PenaltySpec::lasso());
            cfg.penalties.push_back(PenaltySpec::elastic_net(a.alpha));
            cfg.penalties.push_back(PenaltySpec::gen_elastic_net(a.alpha));
        } else {
            cfg.penalties.push_back(penalty_from_name(p, a.alpha));
        }
    }
    cfg.criteria.clear();
    for (const auto& c : a.criteria) {
        if (c == "all") {
            cfg.criteria = {SimCriterion::Cp, SimCriterion::Aicc, SimCriterion::Gcv,
                            SimCriterion::Bic, SimCriterion::Cv};
            break;
        }
        cfg.criteria.push_back(sim_criterion_from_string(c));
    }

    json manifest = manifest_base("simulate");
    json o;
    o["example"] = a.example;
    o["reps"] = a.reps;
    o["seed"] = a.seed;
    o["penalties"] = a.penalties;
    o["alpha"] = a.alpha;
    o["criteria"] = a.criteria;
    o["tau2"] = a.tau2;
    o["steps"] = a.steps;
    o["compare_df"] = a.compare_df;
    o["folds"] = a.folds;
    o["format"] = a.format;
    manifest["options"] = o;
    manifest["inputs"] = json::object();

    json doc;
    doc["manifest"] = manifest;
    json cells = json::array();

    auto cell_to_json = [](const SimCell& c) {
        json r;
        r["penalty"] = c.penalty;
        r["criterion"] = c.criterion;
        r["mse"] = c.mse;
        r["sd"] = c.sd;
        r["se_of_mse"] = c.se_of_mse;
        if (c.zz)
            r["zz"] = *c.zz;
        else
            r["zz"] = nullptr;
        r["nn"] = c.nn;
        r["zz_counts"] = {c.zz_num, c.zz_den};
        r["nn_counts"] = {c.nn_num, c.nn_den};
        return r;
    };

    if (a.compare_df) {
        auto cmp = compare_df(cfg);
        cells.push_back(cell_to_json(cmp.gps));
        cells.push_back(cell_to_json(cmp.zou));
        doc["paired"] = {{"mean_diff", cmp.mean_diff}, {"se_diff", cmp.se_diff}};
    } else {
        auto res = run_example(cfg);
        for (const auto& c : res.cells) cells.push_back(cell_to_json(c));
    }
    doc["cells"] = cells;
    doc["timing"] = {{"seconds", std::chrono::duration<double>(
                                     std::chrono::steady_clock::now() - t_start)
                                     .count()}};

    if (a.format == "csv") {
        std::ostringstream csv;
        csv << "penalty,criterion,mse,sd,zz,nn,se_of_mse\n";
        for (const auto& c : cells) {
            csv << c["penalty"].get<std::string>() << "," << c["criterion"].get<std::string>()
                << "," << c["mse"].dump() << "," << c["sd"].dump() << ","
                << (c["zz"].is_null() ? std::string("") : c["zz"].dump()) << ","
                << c["nn"].dump() << "," << c["se_of_mse"].dump() << "\n";
        }
        write_text(csv.str(), a.out);
    } else {
        write_output(doc, a.out);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
    std::vector<Eigen::Index> n_list{100, 200, 500};
    int reps = 20;
    int steps = 20000;
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "json";
};

int run_bench(const BenchArgs& a) {
    PathOptions opts;
    opts.step_budget = a.steps;
    auto rows = bench_timing(a.n_list, a.reps, opts, a.seed);

    json manifest = manifest_base("bench");
    json o;
    o["n"] = a.n_list;
    o["reps"] = a.reps;
    o["steps"] = a.steps;
    o["seed"] = a.seed;
    o["format"] = a.format;
    manifest["options"] = o;
    manifest["inputs"] = json::object();

    json doc;
    doc["manifest"] = manifest;
    json jrows = json::array();
    for (const auto& r : rows) {
        jrows.push_back({{"n", r.n},
                         {"path_steps", r.path_steps},
                         {"timing_dense_seconds", r.dense_seconds},
                         {"timing_reduced_seconds", r.reduced_seconds},
                         {"timing_ratio", r.ratio}});
    }
    doc["rows"] = jrows;
    if (rows.size() >= 2) {
        // log-log growth rates across the measured sizes
        auto slope = [&](bool dense) {
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (const auto& r : rows) {
                double x = std::log(static_cast<double>(r.n));
                double y = std::log(dense ? r.dense_seconds : r.reduced_seconds);
                sx += x;
                sy += y;
                sxx += x * x;
                sxy += x * y;
            }
            double n = static_cast<double>(rows.size());
            return (n * sxy - sx * sy) / (n * sxx - sx * sx);
        };
        doc["timing_loglog_slopes"] = {{"dense", slope(true)}, {"reduced", slope(false)}};
    }

    if (a.format == "csv") {
        std::ostringstream csv;
        csv << "n,path_steps,dense_seconds,reduced_seconds,ratio\n";
        for (const auto& r : rows)
            csv << r.n << "," << r.path_steps << "," << r.dense_seconds << ","
                << r.reduced_seconds << "," << r.ratio << "\n";
        write_text(csv.str(), a.out);
    } else {
        write_output(doc, a.out);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
    std::string data;
    std::string response = "y";
    int steps = 5000;
    std::string out;
};

int run_verify(const VerifyArgs& a) {
    RawDataset raw = load_csv(a.data, a.response);
    PathOptions opts;
    opts.step_budget = a.steps;
    auto reports = verify_dataset(raw, opts);

    std::ostringstream lines;
    bool all_pass = true;
    for (const auto& r : reports) {
        json j;
        j["instance"] = r.instance;
        j["metric"] = r.metric;
        j["main"] = r.main_value;
        j["oracle"] = r.oracle_value;
        j["tolerance"] = r.tolerance;
        j["pass"] = r.pass;
        lines << j.dump() << "\n";
        all_pass = all_pass && r.pass;
    }
    write_text(lines.str(), a.out);
    if (!all_pass) throw numerical_error("verification failed; see report lines");
    return 0;
}

// ---------------------------------------------------------------------------
// replay

int dispatch_from_manifest(const json& manifest, const std::string& out_override);

int run_replay(const std::string& manifest_path, const std::string& out_override) {
    std::ifstream f(manifest_path);
    if (!f) throw input_error("cannot open manifest: " + manifest_path);
    json doc = json::parse(f, nullptr, /*allow_exceptions=*/true);
    json manifest = doc.contains("manifest") ? doc["manifest"] : doc;
    if (!manifest.contains("command") || !manifest.contains("options"))
        throw input_error("manifest lacks command/options");

    // refuse to replay against modified inputs
    if (manifest.contains("inputs")) {
        for (const auto& [name, meta] : manifest["inputs"].items()) {
            std::string path = meta["path"].get<std::string>();
            std::string digest = meta["digest"].get<std::string>();
            if (hex64(fnv1a64_file(path)) != digest)
                throw input_error("input file '" + path + "' no longer matches digest " + digest);
        }
    }
    return dispatch_from_manifest(manifest, out_override);
}

int dispatch_from_manifest(const json& manifest, const std::string& out_override) {
    const std::string cmd = manifest["command"].get<std::string>();
    const json& o = manifest["options"];
    if (cmd == "fit") {
        FitArgs a;
        a.data = o["data"].get<std::string>();
        a.response = o["response"].get<std::string>();
        a.penalty = o["penalty"].get<std::string>();
        a.alpha = o["alpha"].get<double>();
        a.steps = o["steps"].get<int>();
        a.delta_t = o["delta_t"].get<double>();
        a.max_vars = o["max_vars"].get<int>();
        a.criteria = o["criteria"].get<std::vector<std::string>>();
        a.tau2 = o["tau2"].get<std::string>();
        a.df_mode = o["df"].get<std::string>();
        a.thin = o["thin"].get<int>();
        a.seed = o["seed"].get<std::uint64_t>();
        a.folds = o["folds"].get<int>();
        a.aicc_form = o["aicc_form"].get<std::string>();
        a.trace_var = o["trace_var"].get<std::string>();
        a.plot_data = o["plot_data"].get<std::string>();
        a.format = o["format"].get<std::string>();
        a.out = out_override;
        return run_fit(a);
    }
    if (cmd == "simulate") {
        SimulateArgs a;
        a.example = o["example"].get<int>();
        a.reps = o["reps"].get<int>();
        a.seed = o["seed"].get<std::uint64_t>();
        a.penalties = o["penalties"].get<std::vector<std::string>>();
        a.alpha = o["alpha"].get<double>();
        a.criteria = o["criteria"].get<std::vector<std::string>>();
        a.tau2 = o["tau2"].get<std::string>();
        a.steps = o["steps"].get<int>();
        a.compare_df = o["compare_df"].get<bool>();
        a.folds = o["folds"].get<int>();
        a.format = o["format"].get<std::string>();
        a.out = out_override;
        return run_simulate(a);
    }
    if (cmd == "bench") {
        BenchArgs a;
        a.n_list = o["n"].get<std::vector<Eigen::Index>>();
        a.reps = o["reps"].get<int>();
        a.steps = o["steps"].get<int>();
        a.seed = o["seed"].get<std::uint64_t>();
        a.format = o["format"].get<std::string>();
        a.out = out_override;
        return run_bench(a);
    }
    throw input_error("manifest command '" + cmd + "' is not replayable");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Regularization paths with online degrees of freedom and "
                 "tuning-parameter selection"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    FitArgs fa;
    auto* fit_cmd = app.add_subcommand("fit", "Fit a path on CSV data and select models");
    fit_cmd->add_option("--data", fa.data, "CSV file with a header row")->required();
    fit_cmd->add_option("--response", fa.response, "response column name");
    fit_cmd->add_option("--penalty", fa.penalty, "lasso|enet|genet");
    fit_cmd->add_option("--alpha", fa.alpha, "penalty mixing parameter");
    fit_cmd->add_option("--steps", fa.steps, "step budget for the automatic step size");
    fit_cmd->add_option("--delta-t", fa.delta_t, "explicit step size (0 = auto)");
    fit_cmd->add_option("--max-vars", fa.max_vars, "stop after this many distinct variables");
    fit_cmd->add_option("--criterion", fa.criteria, "cp|aic|aicc|bic|gcv|cv|all (repeatable)");
    fit_cmd->add_option("--tau2", fa.tau2, "auto or a positive value");
    fit_cmd->add_option("--df", fa.df_mode, "dense|reduced|both");
    fit_cmd->add_option("--thin", fa.thin, "emit every r-th step");
    fit_cmd->add_option("--seed", fa.seed, "seed for cross-validation folds");
    fit_cmd->add_option("--folds", fa.folds, "cross-validation folds");
    fit_cmd->add_option("--aicc-form", fa.aicc_form, "plus|literal complexity sign");
    fit_cmd->add_option("--trace-var", fa.trace_var, "emit the gradient trace of one predictor");
    fit_cmd->add_option("--plot-data", fa.plot_data, "directory for two-column plot files");
    fit_cmd->add_option("--out", fa.out, "output file (default stdout)");
    fit_cmd->add_option("--format", fa.format, "json|csv");

    SimulateArgs sa;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo study on synthetic data");
    sim_cmd->add_option("--example", sa.example, "benchmark configuration 1..4")->required();
    sim_cmd->add_option("--reps", sa.reps, "replicates");
    sim_cmd->add_option("--seed", sa.seed, "root seed");
    sim_cmd->add_option("--penalty", sa.penalties, "lasso|enet|genet|all (repeatable)");
    sim_cmd->add_option("--alpha", sa.alpha, "penalty mixing parameter");
    sim_cmd->add_option("--criterion", sa.criteria, "cp|aic|aicc|bic|gcv|cv|all (repeatable)");
    sim_cmd->add_option("--tau2", sa.tau2, "true|estimated");
    sim_cmd->add_option("--steps", sa.steps, "path step budget");
    sim_cmd->add_flag("--compare-df", sa.compare_df,
                      "paired tracker-vs-nonzero-count study (lasso, Cp, true tau2)");
    sim_cmd->add_option("--folds", sa.folds, "cross-validation folds");
    sim_cmd->add_option("--out", sa.out, "output file (default stdout)");
    sim_cmd->add_option("--format", sa.format, "json|csv");

    BenchArgs ba;
    auto* bench_cmd = app.add_subcommand("bench", "Tracker timing comparison");
    bench_cmd->add_option("--n", ba.n_list, "sample sizes")->delimiter(',');
    bench_cmd->add_option("--reps", ba.reps, "repetitions per size");
    bench_cmd->add_option("--steps", ba.steps, "path step budget");
    bench_cmd->add_option("--seed", ba.seed, "root seed");
    bench_cmd->add_option("--out", ba.out, "output file (default stdout)");
    bench_cmd->add_option("--format", ba.format, "json|csv");

    VerifyArgs va;
    auto* verify_cmd = app.add_subcommand("verify", "Cross-check the build against its oracles");
    verify_cmd->add_option("--data", va.data, "CSV file")->required();
    verify_cmd->add_option("--response", va.response, "response column name");
    verify_cmd->add_option("--steps", va.steps, "path step budget");
    verify_cmd->add_option("--out", va.out, "output file (default stdout)");

    std::string replay_manifest, replay_out;
    auto* replay_cmd = app.add_subcommand("replay", "Re-run a command from its manifest");
    replay_cmd->add_option("--manifest", replay_manifest, "manifest or output JSON")->required();
    replay_cmd->add_option("--out", replay_out, "output file (default stdout)");

    try {
        app.parse(argc, argv);
        if (*fit_cmd) return run_fit(fa);
        if (*sim_cmd) return run_simulate(sa);
        if (*bench_cmd) return run_bench(ba);
        if (*verify_cmd) return run_verify(va);
        if (*replay_cmd) return run_replay(replay_manifest, replay_out);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
