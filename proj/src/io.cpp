#include "sabc/io.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sabc {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string g17(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector to_vector(const json& arr, const std::string& what)
{
    if (!arr.is_array()) throw InputError(what + " must be an array");
    Vector v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number()) throw InputError(what + " must hold numbers");
        v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
    }
    return v;
}

ordered_json parse_ordered(const std::string& text, const std::string& where)
{
    try {
        return ordered_json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(where + ": " + e.what());
    }
}

double number_at(const ordered_json& j, const char* key, const std::string& where)
{
    if (!j.contains(key) || !j[key].is_number()) throw InputError(where + ": missing numeric '" + key + "'");
    return j[key].get<double>();
}

}  // namespace

std::string format_double(double v) { return g17(v); }

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << text;
    if (!out) throw InputError("failed writing " + path.string());
}

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_dataset(const Dataset& data, const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError("cannot create directory " + dir.string() + ": " + ec.message());

    std::string csv = "t,acc\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        csv += g17(data.t()[k]) + "," + g17(data.acc()[k]) + "\n";
    }
    write_text(dir / "data.csv", csv);

    ordered_json meta;
    meta["x0"] = data.x0();
    meta["v0"] = data.v0();
    meta["dt"] = data.dt();
    meta["noise_pct"] = data.noise_pct();
    meta["seed"] = data.seed;
    meta["truth_name"] = data.truth_name;
    ordered_json coefs = ordered_json::object();
    for (const auto& [label, c] : data.truth_coefficients) coefs[label] = c;
    meta["truth_coefficients"] = coefs;
    write_text(dir / "data.meta.json", meta.dump(2) + "\n");
}

Dataset read_dataset(const fs::path& csv)
{
    if (!fs::exists(csv)) throw InputError("dataset file not found: " + csv.string());
    fs::path meta_path = csv;
    meta_path.replace_extension(".meta.json");
    if (!fs::exists(meta_path)) throw InputError("dataset sidecar not found: " + meta_path.string());

    std::istringstream in(read_text(csv));
    std::string line;
    if (!std::getline(in, line)) throw InputError(csv.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t,acc") throw InputError(csv.string() + ": header must be 't,acc', got '" + line + "'");

    std::vector<double> t, acc;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        try {
            if (comma == std::string::npos) throw std::invalid_argument("no comma");
            std::size_t used = 0;
            const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
            t.push_back(std::stod(a, &used));
            if (used != a.size()) throw std::invalid_argument("trailing text");
            acc.push_back(std::stod(b, &used));
            if (used != b.size()) throw std::invalid_argument("trailing text");
        } catch (const std::exception&) {
            throw InputError(csv.string() + ":" + std::to_string(lineno) + ": expected 't,acc' numbers");
        }
    }
    if (t.size() < 2) throw InputError(csv.string() + ": need at least two samples");

    const std::string where = meta_path.string();
    const ordered_json meta = parse_ordered(read_text(meta_path), where);
    if (!meta.is_object()) throw InputError(where + ": expected an object");
    const double x0 = number_at(meta, "x0", where);
    const double v0 = number_at(meta, "v0", where);
    const double noise = meta.contains("noise_pct") ? number_at(meta, "noise_pct", where) : 0.0;

    Dataset data(Eigen::Map<const Vector>(t.data(), static_cast<Eigen::Index>(t.size())),
                 Eigen::Map<const Vector>(acc.data(), static_cast<Eigen::Index>(acc.size())), x0, v0, noise);
    if (meta.contains("dt")) {
        const double dt = number_at(meta, "dt", where);
        if (std::abs(dt - data.dt()) > 1e-9 * dt) {
            throw InputError(where + ": dt " + g17(dt) + " disagrees with sample spacing " + g17(data.dt()));
        }
    }
    if (meta.contains("seed") && meta["seed"].is_number_unsigned()) data.seed = meta["seed"].get<std::uint64_t>();
    if (meta.contains("truth_name") && meta["truth_name"].is_string()) data.truth_name = meta["truth_name"];
    if (meta.contains("truth_coefficients") && meta["truth_coefficients"].is_object()) {
        for (const auto& [k, v] : meta["truth_coefficients"].items()) {
            if (!v.is_number()) throw InputError(where + ": truth coefficient '" + k + "' is not a number");
            data.truth_coefficients.emplace_back(k, v.get<double>());
        }
    }
    return data;
}

std::string format_model(const Dictionary& dict, const Vector& theta)
{
    if (static_cast<std::size_t>(theta.size()) != dict.size()) throw InputError("theta / dictionary size mismatch");
    std::string out = "xdd =";
    bool first = true;
    char buf[64];
    for (std::size_t i = 0; i < dict.size(); ++i) {
        const double c = theta[static_cast<Eigen::Index>(i)];
        if (c == 0.0) continue;
        std::snprintf(buf, sizeof buf, "%.6g", std::abs(c));
        if (first) out += c < 0 ? " -" : " ";
        else out += c < 0 ? " - " : " + ";
        out += buf;
        if (dict[i].kind != TermSpec::Kind::constant) out += "*" + dict[i].label();
        first = false;
    }
    if (first) out += " 0";
    return out;
}

std::string report_json(const RunReport& report, const Dictionary& dict, const SabcConfig& cfg)
{
    ordered_json j;
    j["terms"] = dict.labels();
    j["best"] = {{"theta", to_std(report.best.theta)},
                 {"loss", {{"total", report.best.loss.total}, {"nmse", report.best.loss.nmse}, {"l0", report.best.loss.l0}}},
                 {"model", format_model(dict, report.best.theta)}};
    j["inclusion_probability"] = to_std(report.inclusion_prob);
    if (report.delta1 || report.delta2) {
        ordered_json m;
        if (report.delta1) m["delta1"] = *report.delta1;
        if (report.delta2) m["delta2"] = *report.delta2;
        j["metrics"] = m;
    }

    ordered_json rounds = ordered_json::array();
    for (const auto& r : report.rounds) {
        ordered_json o{{"round", r.round},
                       {"beta", r.beta},
                       {"epsilon1", r.epsilon1},
                       {"epsilon_tol", r.epsilon_tol},
                       {"final_epsilon", r.final_epsilon},
                       {"populations", r.populations}};
        if (r.gamma) o["gamma"] = *r.gamma;
        if (r.reinit_kprime) o["reinit_kprime"] = *r.reinit_kprime;
        rounds.push_back(o);
    }
    j["rounds"] = rounds;

    ordered_json trace = ordered_json::array();
    for (const auto& p : report.populations) {
        ordered_json o{{"round", p.round},       {"population", p.population}, {"epsilon", p.epsilon},
                       {"min_loss", p.min_loss}, {"median_loss", p.median_loss}, {"n_active", p.n_active},
                       {"draws", p.draws},       {"accepted", p.accepted}};
        if (p.kprime) {
            o["kprime"] = *p.kprime;
            o["mixture_weights"] = p.mixture_weights;
            o["top_component_mean"] = p.top_component_mean;
        }
        trace.push_back(o);
    }
    j["trace"] = trace;

    ordered_json c;
    c["n_particles"] = cfg.n_particles;
    c["alpha"] = cfg.alpha;
    c["eta"] = cfg.eta;
    c["k_max"] = cfg.k_max;
    c["seed"] = cfg.seed;
    c["max_draws"] = cfg.max_draws;
    c["substeps"] = cfg.sim.substeps;
    c["lambda"] = to_std(resolve_lambda(dict, cfg.prior, cfg.lambda));
    const SlabPrior slab = slab_bounds_for(dict, cfg.prior);
    c["prior_half_width"] = to_std(slab.half_widths());
    c["em"] = {{"restarts", cfg.em.restarts},
               {"tol", cfg.em.tol},
               {"max_iter", cfg.em.max_iter},
               {"ridge_rel", cfg.em.ridge_rel}};
    c["bic"] = "p*ln(n) - 2*loglik, p = (K-1) + K*d + K*d*(d+1)/2";
    j["config"] = c;
    return j.dump(2) + "\n";
}

std::string canonical_json(const std::string& text)
{
    return parse_ordered(text, "report").dump(2) + "\n";
}

StoredReport parse_report(const std::string& text)
{
    const ordered_json j = parse_ordered(text, "report");
    StoredReport r;
    if (!j.contains("terms") || !j["terms"].is_array()) throw InputError("report: missing 'terms'");
    for (const auto& t : j["terms"]) {
        if (!t.is_string()) throw InputError("report: terms must be strings");
        r.terms.push_back(t.get<std::string>());
    }
    if (!j.contains("best") || !j["best"].is_object()) throw InputError("report: missing 'best'");
    const auto& best = j["best"];
    if (!best.contains("theta")) throw InputError("report: missing 'best.theta'");
    r.best_theta = to_vector(best["theta"], "report best.theta");
    if (static_cast<std::size_t>(r.best_theta.size()) != r.terms.size()) {
        throw InputError("report: best.theta has " + std::to_string(r.best_theta.size()) + " entries for " +
                         std::to_string(r.terms.size()) + " terms");
    }
    if (!best.contains("loss") || !best["loss"].is_object()) throw InputError("report: missing 'best.loss'");
    r.best_loss = number_at(best["loss"], "total", "report best.loss");
    r.best_nmse = number_at(best["loss"], "nmse", "report best.loss");
    r.best_l0 = static_cast<int>(number_at(best["loss"], "l0", "report best.loss"));
    if (j.contains("inclusion_probability")) {
        r.inclusion_prob = to_vector(j["inclusion_probability"], "report inclusion_probability");
    }
    return r;
}

StoredReport read_report(const fs::path& path)
{
    if (!fs::exists(path)) throw InputError("report not found: " + path.string());
    return parse_report(read_text(path));
}

std::string inclusion_csv(const Dictionary& dict, const Vector& inclusion_prob)
{
    std::string out = "term,IP\n";
    for (std::size_t i = 0; i < dict.size(); ++i) {
        out += dict[i].label() + "," + g17(inclusion_prob[static_cast<Eigen::Index>(i)]) + "\n";
    }
    return out;
}

std::string trace_csv(const std::vector<PopulationSummary>& populations)
{
    std::string out = "round,population,epsilon,min_loss,median_loss,N_A,Kprime\n";
    for (const auto& p : populations) {
        out += std::to_string(p.round) + "," + std::to_string(p.population) + "," + g17(p.epsilon) + "," +
               g17(p.min_loss) + "," + g17(p.median_loss) + "," + std::to_string(p.n_active) + "," +
               (p.kprime ? std::to_string(*p.kprime) : std::string()) + "\n";
    }
    return out;
}

std::string prediction_csv(const Dataset& data, const Dictionary& dict, const Vector& theta, const SimOptions& sim)
{
    const std::optional<Vector> pred = simulate_acceleration(dict, theta, data, sim);
    std::string out = "t,acc_measured,acc_discovered\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        out += g17(data.t()[k]) + "," + g17(data.acc()[k]) + "," + (pred ? g17((*pred)[k]) : std::string()) + "\n";
    }
    return out;
}

std::vector<std::pair<std::string, double>> read_truth(const fs::path& path)
{
    if (!fs::exists(path)) throw InputError("truth file not found: " + path.string());
    const ordered_json j = parse_ordered(read_text(path), path.string());
    // a dataset sidecar is accepted as well
    const ordered_json& obj = j.is_object() && j.contains("truth_coefficients") ? j["truth_coefficients"] : j;
    if (!obj.is_object() || obj.empty()) throw InputError(path.string() + ": expected a non-empty term -> coefficient object");
    std::vector<std::pair<std::string, double>> out;
    for (const auto& [k, v] : obj.items()) {
        if (!v.is_number()) throw InputError(path.string() + ": coefficient of '" + k + "' is not a number");
        out.emplace_back(k, v.get<double>());
    }
    return out;
}

std::string evaluation_json(const StoredReport& report, const Dictionary& dict, const TruthModel& truth)
{
    Particle best{report.best_theta, {}};
    const SupportComparison cmp = compare_support(report.best_theta, truth);
    auto names = [&](const std::vector<std::size_t>& idx) {
        std::vector<std::string> out;
        for (auto i : idx) out.push_back(dict[i].label());
        return out;
    };
    ordered_json j;
    j["delta1"] = delta1(best, truth.size());
    j["delta2"] = delta2_msre(report.best_theta, truth);
    j["matched"] = names(cmp.matched);
    j["missing"] = names(cmp.missing);
    j["extra"] = names(cmp.extra);
    j["support_exact"] = cmp.missing.empty() && cmp.extra.empty();
    j["model"] = format_model(dict, report.best_theta);
    return j.dump(2) + "\n";
}

}  // namespace sabc
