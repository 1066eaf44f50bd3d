#include "bosonchain/recipes.hpp"
#include "bosonchain/scaling.hpp"
#include "bosonchain/sweep.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace bosonchain;

std::vector<ResultRecord> load_records(const std::string& path) {
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
        std::ifstream in(path);
        if (!in)
            throw std::invalid_argument("cannot open " + path);
        nlohmann::json arr = nlohmann::json::parse(in);
        std::vector<ResultRecord> records;
        for (const auto& j : arr) {
            ResultRecord r;
            r.alpha = j.at("alpha").get<double>();
            r.gamma = j.at("gamma").get<double>();
            r.size = j.at("L").get<int>();
            r.measurement =
                j.at("measurement").get<std::string>() == "nonlocal" ? Measurement::Nonlocal
                                                                     : Measurement::Local;
            r.eta = j.at("eta").get<double>();
            r.converged = j.at("converged").get<bool>();
            auto opt = [&](const char* key) -> std::optional<double> {
                if (!j.contains(key) || j.at(key).is_null())
                    return std::nullopt;
                return j.at(key).get<double>();
            };
            r.entropy_half = opt("S_A");
            r.mutual_information = opt("I_BC");
            r.negativity_half = opt("N_A");
            r.corr_mid_end = opt("corr_mid_end");
            r.residual = j.at("residual").get<double>();
            r.walltime_s = j.at("walltime_s").get<double>();
            if (j.contains("entropy_profile"))
                r.entropy_profile = j.at("entropy_profile").get<std::vector<double>>();
            records.push_back(std::move(r));
        }
        return records;
    }
    return load_csv_file(path);
}

struct RecordFilter {
    std::optional<double> alpha, gamma, eta;
    std::optional<std::string> measurement;

    bool matches(const ResultRecord& r) const {
        if (alpha && r.alpha != *alpha)
            return false;
        if (gamma && r.gamma != *gamma)
            return false;
        if (eta && r.eta != *eta)
            return false;
        if (measurement && to_string(r.measurement) != *measurement)
            return false;
        return r.converged;
    }
};

std::vector<ResultRecord> apply_filter(const std::vector<ResultRecord>& records,
                                       const RecordFilter& f) {
    std::vector<ResultRecord> out;
    for (const auto& r : records)
        if (f.matches(r))
            out.push_back(r);
    if (out.empty())
        throw std::invalid_argument("no converged records match the filter");
    return out;
}

double observable_of(const ResultRecord& r, const std::string& name) {
    std::optional<double> v;
    if (name == "S_A")
        v = r.entropy_half;
    else if (name == "I_BC")
        v = r.mutual_information;
    else if (name == "N_A")
        v = r.negativity_half;
    else if (name == "corr_mid_end")
        v = r.corr_mid_end;
    else
        throw std::invalid_argument("unknown observable: " + name);
    if (!v)
        throw std::invalid_argument("observable " + name + " absent from a matching record");
    return *v;
}

void require_unique_other_axis(const std::vector<ResultRecord>& records, bool alpha_axis) {
    std::set<double> other;
    for (const auto& r : records)
        other.insert(alpha_axis ? r.gamma : r.alpha);
    if (other.size() > 1)
        throw std::invalid_argument(
            "records span several values of the non-control axis; add --alpha/--gamma filters");
}

std::vector<SizedCurve> curves_from(const std::vector<ResultRecord>& records, bool alpha_axis,
                                    const std::string& observable) {
    std::map<int, std::map<double, double>> grouped;
    for (const auto& r : records)
        grouped[r.size][alpha_axis ? r.alpha : r.gamma] = observable_of(r, observable);
    std::vector<SizedCurve> curves;
    for (const auto& [L, pts] : grouped) {
        SizedCurve c;
        c.size = L;
        for (const auto& [x, y] : pts) {
            c.control.push_back(x);
            c.value.push_back(y);
        }
        curves.push_back(std::move(c));
    }
    return curves;
}

void size_series(const std::vector<ResultRecord>& records, const std::string& observable,
                 std::vector<double>& sizes, std::vector<double>& values) {
    std::map<int, double> by_size;
    for (const auto& r : records)
        by_size[r.size] = observable_of(r, observable);
    sizes.clear();
    values.clear();
    for (const auto& [L, v] : by_size) {
        sizes.push_back(L);
        values.push_back(v);
    }
}

int run_simulate(const std::string& config_path, int workers, bool resume, bool no_timing) {
    SweepConfig cfg = parse_sweep_config_file(config_path);
    if (workers > 0)
        cfg.workers = workers;
    cfg.resume = resume;
    cfg.no_timing = no_timing;
    const SweepOutcome outcome = run_sweep(cfg);
    std::cout << "points: " << outcome.records.size() << " solved: " << outcome.solved
              << " skipped: " << outcome.skipped << " failed: " << outcome.failed << "\n";
    std::cout << "dataset: " << cfg.output_dir << "/results.csv\n";
    return outcome.failed > 0 ? 2 : 0;
}

int run_analyze(const std::string& input, const std::string& task, const RecordFilter& filter,
                const std::string& axis, const std::string& observable, int order,
                const std::string& ansatz, double critical_min, double critical_max,
                int critical_steps, double nu_min, double nu_max, int nu_steps, int degree,
                double contour_factor, const std::string& landscape_out) {
    const auto all = load_records(input);
    const auto records = apply_filter(all, filter);
    const bool alpha_axis = axis == "alpha";
    nlohmann::json out;
    out["task"] = task;
    if (task == "power_law") {
        std::vector<double> sizes, values;
        size_series(records, observable, sizes, values);
        const auto fit = fit_power_law(sizes, values);
        out["a"] = fit.fit.params.at("a");
        out["b"] = fit.fit.params.at("b");
        out["b_stderr"] = fit.fit.stderrs.at("b");
        out["mse_log"] = fit.fit.mse;
        out["log_fit_c"] = fit.log_fit.params.at("c");
        out["log_consistent"] = fit.log_consistent;
    } else if (task == "central_charge") {
        nlohmann::json fits = nlohmann::json::array();
        for (const auto& r : records) {
            if (r.entropy_profile.empty())
                continue;
            std::vector<int> cuts;
            std::vector<double> entropies;
            for (int l = 1; l <= static_cast<int>(r.entropy_profile.size()); ++l) {
                cuts.push_back(l);
                entropies.push_back(r.entropy_profile[static_cast<std::size_t>(l - 1)]);
            }
            const auto fit = fit_central_charge(cuts, entropies, r.size);
            fits.push_back({{"L", r.size},
                            {"alpha", r.alpha},
                            {"gamma", r.gamma},
                            {"c", fit.params.at("c")},
                            {"c_stderr", fit.stderrs.at("c")},
                            {"s0", fit.params.at("s0")},
                            {"mse", fit.mse}});
        }
        if (fits.empty())
            throw std::invalid_argument(
                "central_charge needs entropy profiles; use the JSON dataset of a sweep with the "
                "entropy_profile observable");
        out["fits"] = fits;
    } else if (task == "crossing") {
        require_unique_other_axis(records, alpha_axis);
        const auto cr = crossing_point(curves_from(records, alpha_axis, observable));
        out["mean"] = cr.mean;
        out["spread"] = cr.spread;
        out["pairwise"] = cr.pairwise;
    } else if (task == "collapse") {
        require_unique_other_axis(records, alpha_axis);
        CollapseOptions opt;
        opt.ansatz = ansatz == "bkt" ? CollapseAnsatz::BKT : CollapseAnsatz::Algebraic;
        opt.degree = degree;
        opt.critical_min = critical_min;
        opt.critical_max = critical_max;
        opt.critical_steps = critical_steps;
        opt.nu_min = nu_min;
        opt.nu_max = nu_max;
        opt.nu_steps = nu_steps;
        opt.contour_factor = contour_factor;
        const auto curves = curves_from(records, alpha_axis, observable);
        if (!(opt.critical_max > opt.critical_min)) {
            opt.critical_min = curves.front().control.front();
            opt.critical_max = curves.front().control.back();
        }
        const auto col = data_collapse(curves, opt);
        out["critical"] = col.critical;
        out["nu"] = col.nu;
        out["mse"] = col.mse_min;
        out["critical_uncertainty"] = col.critical_uncertainty;
        out["nu_uncertainty"] = col.nu_uncertainty;
        out["contour_touches_boundary"] = col.contour_touches_boundary;
        out["reference_size"] = col.reference_size;
        if (!landscape_out.empty()) {
            std::string csv = "control,nu,mse\n";
            for (const auto& p : col.landscape) {
                csv += detail::format_g17(p.critical);
                csv += ',';
                csv += detail::format_g17(p.nu);
                csv += ',';
                csv += detail::format_g17(p.mse);
                csv += '\n';
            }
            detail::write_file_atomic(landscape_out, csv);
            out["landscape_csv"] = landscape_out;
        }
    } else if (task == "pade") {
        std::vector<double> sizes, values;
        size_series(records, observable, sizes, values);
        const auto fit = pade_fit(sizes, values, order);
        out["order"] = fit.order;
        out["asymptote_finite"] = fit.asymptote_finite;
        if (fit.asymptote_finite)
            out["asymptote"] = fit.asymptote;
        out["singular"] = fit.singular;
        out["sse"] = fit.sse;
        out["reduced_mse"] = fit.reduced_mse;
    } else if (task == "correlation") {
        std::vector<double> sizes, values;
        size_series(records, "corr_mid_end", sizes, values);
        const auto fit = fit_correlation_exponent(sizes, values);
        out["classification"] =
            fit.classification == DecayClassification::PowerLaw ? "power" : "exponential";
        out["p"] = fit.power.params.at("p");
        out["p_stderr"] = fit.power.stderrs.at("p");
        out["xi"] = fit.exponential.params.at("xi");
        out["power_mse"] = fit.power.mse;
        out["exponential_mse"] = fit.exponential.mse;
    } else {
        throw std::invalid_argument("unknown task: " + task);
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int run_reproduce(const std::string& figure, const std::string& scale_str,
                  const std::string& output_dir, int workers, bool no_timing) {
    const auto scale = recipes::parse_scale(scale_str);
    const auto recipe = recipes::make_recipe(figure, scale);
    const auto report = recipes::run_recipe(recipe, output_dir, workers, no_timing, std::cerr);
    nlohmann::json out;
    out["recipe"] = report.name;
    out["scale"] = report.scale;
    out["ok"] = report.ok;
    out["failed_points"] = report.failed_points;
    out["details"] = report.details;
    std::cout << out.dump(2) << "\n";
    return (report.failed_points > 0 || !report.ok) ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"steady states, entanglement diagnostics, and finite-size analysis of "
                 "continuously monitored long-range boson chains"};
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "run a steady-state parameter sweep from a config file");
    std::string config_path;
    int workers = 0;
    bool resume = false, no_timing = false;
    sim->add_option("--config", config_path, "key = value sweep configuration")->required();
    sim->add_option("--workers", workers, "worker threads (overrides the config)");
    sim->add_flag("--resume", resume, "skip points already present in the journal");
    sim->add_flag("--no-timing", no_timing, "zero the walltime column for byte-stable output");

    auto* ana = app.add_subcommand("analyze", "fit scaling laws to a sweep dataset");
    std::string input, task, axis = "alpha", observable = "S_A", ansatz = "algebraic";
    std::string landscape_out;
    RecordFilter filter;
    double f_alpha = 0, f_gamma = 0, f_eta = 0;
    std::string f_measurement;
    int order = 1, critical_steps = 41, nu_steps = 61, degree = 5;
    double critical_min = 0, critical_max = 0, nu_min = 1.0, nu_max = 100.0, contour_factor = 4.0;
    ana->add_option("--input", input, "results.csv or results.json from simulate")->required();
    ana->add_option("--task", task, "power_law|central_charge|collapse|crossing|pade|correlation")
        ->required();
    auto* oa = ana->add_option("--alpha", f_alpha, "keep only records at this alpha");
    auto* og = ana->add_option("--gamma", f_gamma, "keep only records at this gamma");
    auto* oe = ana->add_option("--eta", f_eta, "keep only records at this eta");
    ana->add_option("--measurement", f_measurement, "keep only local or nonlocal records");
    ana->add_option("--axis", axis, "control axis for crossing/collapse: alpha or gamma");
    ana->add_option("--observable", observable, "S_A|I_BC|N_A|corr_mid_end");
    ana->add_option("--order", order, "rational approximant order (pade)");
    ana->add_option("--ansatz", ansatz, "collapse ansatz: algebraic or bkt");
    ana->add_option("--critical-min", critical_min, "collapse: candidate window lower edge");
    ana->add_option("--critical-max", critical_max, "collapse: candidate window upper edge");
    ana->add_option("--critical-steps", critical_steps, "collapse: candidate grid size");
    ana->add_option("--nu-min", nu_min, "collapse: smallest trial exponent");
    ana->add_option("--nu-max", nu_max, "collapse: largest trial exponent");
    ana->add_option("--nu-steps", nu_steps, "collapse: exponent grid size (log-spaced)");
    ana->add_option("--degree", degree, "collapse: master-curve polynomial degree");
    ana->add_option("--contour-factor", contour_factor, "collapse: uncertainty contour level");
    ana->add_option("--landscape-out", landscape_out, "collapse: write (control, nu, mse) CSV here");

    auto* rep = app.add_subcommand("reproduce", "run a named experiment recipe end to end");
    std::string figure, scale = "desk", output_dir = "reproduce_out";
    int rworkers = 1;
    bool rno_timing = false;
    rep->add_option("--figure", figure, "fig2|fig3|fig4|appd|appe|appf|apph")->required();
    rep->add_option("--scale", scale, "desk or paper");
    rep->add_option("--output-dir", output_dir, "directory for sweeps and datasets");
    rep->add_option("--workers", rworkers, "worker threads");
    rep->add_flag("--no-timing", rno_timing, "zero the walltime column for byte-stable output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 1;
    }

    try {
        if (sim->parsed())
            return run_simulate(config_path, workers, resume, no_timing);
        if (ana->parsed()) {
            if (oa->count())
                filter.alpha = f_alpha;
            if (og->count())
                filter.gamma = f_gamma;
            if (oe->count())
                filter.eta = f_eta;
            if (!f_measurement.empty())
                filter.measurement = f_measurement;
            return run_analyze(input, task, filter, axis, observable, order, ansatz, critical_min,
                               critical_max, critical_steps, nu_min, nu_max, nu_steps, degree,
                               contour_factor, landscape_out);
        }
        if (rep->parsed())
            return run_reproduce(figure, scale, output_dir, rworkers, rno_timing);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
