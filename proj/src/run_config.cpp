#include "sabc/run_config.hpp"

#include "sabc/io.hpp"

#include "json.hpp"

#include <algorithm>
#include <initializer_list>
#include <map>

namespace sabc {

using nlohmann::json;

namespace {

/// A JSON object together with its key path, for error messages.
class Node {
public:
    Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

    const json& raw() const { return j_; }
    const std::string& path() const { return path_; }

    void require_object() const
    {
        if (!j_.is_object()) fail("must be an object");
    }
    void allow_only(std::initializer_list<const char*> keys) const
    {
        require_object();
        for (const auto& [k, _] : j_.items()) {
            if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; })) {
                throw InputError("config: unknown key '" + join(k) + "'");
            }
        }
    }
    bool has(const char* key) const { return j_.contains(key); }
    Node at(const char* key) const
    {
        if (!j_.contains(key)) throw InputError("config: missing key '" + join(key) + "'");
        return {j_.at(key), join(key)};
    }

    double number() const
    {
        if (!j_.is_number()) fail("must be a number");
        return j_.get<double>();
    }
    std::uint64_t unsigned_int() const
    {
        if (!j_.is_number_unsigned()) fail("must be a non-negative integer");
        return j_.get<std::uint64_t>();
    }
    std::string string() const
    {
        if (!j_.is_string()) fail("must be a string");
        return j_.get<std::string>();
    }
    bool boolean() const
    {
        if (!j_.is_boolean()) fail("must be true or false");
        return j_.get<bool>();
    }

    template <class F>
    void opt(const char* key, F&& f) const
    {
        if (has(key)) f(at(key));
    }

    [[noreturn]] void fail(const std::string& what) const { throw InputError("config: '" + path_ + "' " + what); }

private:
    std::string join(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

    const json& j_;
    std::string path_;
};

int to_int(const Node& n)
{
    const std::uint64_t v = n.unsigned_int();
    if (v > 1'000'000'000ULL) n.fail("is too large");
    return static_cast<int>(v);
}

RoundSettings parse_round(const Node& n)
{
    n.allow_only({"epsilon1", "epsilon_tol", "beta", "gamma"});
    RoundSettings r;
    n.opt("epsilon1", [&](const Node& v) { r.epsilon1 = v.number(); });
    n.opt("epsilon_tol", [&](const Node& v) { r.epsilon_tol = v.number(); });
    n.opt("beta", [&](const Node& v) { r.beta = v.number(); });
    n.opt("gamma", [&](const Node& v) { r.gamma = v.number(); });
    return r;
}

SabcConfig parse_sabc(const Node& n, bool& substeps_given)
{
    n.allow_only({"n_particles", "alpha", "eta", "beta", "lambda", "prior", "k_max", "epsilon1", "epsilon_tol", "gamma",
                  "rounds", "seed", "max_draws", "em", "sim"});
    SabcConfig c;
    n.opt("n_particles", [&](const Node& v) { c.n_particles = static_cast<std::size_t>(to_int(v)); });
    n.opt("alpha", [&](const Node& v) { c.alpha = v.number(); });
    n.opt("eta", [&](const Node& v) { c.eta = v.number(); });
    n.opt("beta", [&](const Node& v) { c.beta = v.number(); });
    n.opt("k_max", [&](const Node& v) { c.k_max = to_int(v); });
    n.opt("epsilon1", [&](const Node& v) { c.epsilon1 = v.number(); });
    n.opt("epsilon_tol", [&](const Node& v) { c.epsilon_tol = v.number(); });
    n.opt("gamma", [&](const Node& v) { c.gamma = v.number(); });
    n.opt("seed", [&](const Node& v) { c.seed = v.unsigned_int(); });
    n.opt("max_draws", [&](const Node& v) { c.max_draws = v.unsigned_int(); });
    n.opt("lambda", [&](const Node& v) {
        if (v.raw().is_array()) {
            c.lambda.values.clear();
            for (std::size_t i = 0; i < v.raw().size(); ++i) {
                c.lambda.values.push_back(Node(v.raw()[i], v.path() + "[" + std::to_string(i) + "]").number());
            }
            return;
        }
        v.allow_only({"scale", "relative_to_prior"});
        v.opt("scale", [&](const Node& s) { c.lambda.scale = s.number(); });
        v.opt("relative_to_prior", [&](const Node& s) { c.lambda.relative_to_prior = s.boolean(); });
    });
    n.opt("prior", [&](const Node& v) {
        v.allow_only({"scheme", "a"});
        v.opt("scheme", [&](const Node& s) {
            const std::string name = s.string();
            if (name == "uniform") c.prior.scheme = PriorSpec::Scheme::uniform;
            else if (name == "informed") c.prior.scheme = PriorSpec::Scheme::informed;
            else s.fail("must be 'uniform' or 'informed'");
        });
        v.opt("a", [&](const Node& s) { c.prior.a = s.number(); });
    });
    n.opt("rounds", [&](const Node& v) {
        if (!v.raw().is_array() || v.raw().empty()) v.fail("must be a non-empty array");
        c.rounds.clear();
        for (std::size_t i = 0; i < v.raw().size(); ++i) {
            c.rounds.push_back(parse_round(Node(v.raw()[i], v.path() + "[" + std::to_string(i) + "]")));
        }
    });
    n.opt("em", [&](const Node& v) {
        v.allow_only({"restarts", "tol", "max_iter", "ridge_rel"});
        v.opt("restarts", [&](const Node& s) { c.em.restarts = to_int(s); });
        v.opt("tol", [&](const Node& s) { c.em.tol = s.number(); });
        v.opt("max_iter", [&](const Node& s) { c.em.max_iter = to_int(s); });
        v.opt("ridge_rel", [&](const Node& s) { c.em.ridge_rel = s.number(); });
    });
    n.opt("sim", [&](const Node& v) {
        v.allow_only({"substeps", "blowup"});
        v.opt("substeps", [&](const Node& s) {
            c.sim.substeps = to_int(s);
            substeps_given = true;
        });
        v.opt("blowup", [&](const Node& s) { c.sim.blowup = s.number(); });
    });
    return c;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p)
{
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

const std::map<std::string, std::string>& presets()
{
    static const std::map<std::string, std::string> table = {
        {"pendulum-paper", R"({
  "dataset": {"benchmark": "pendulum", "noise": 0.02, "seed": 1},
  "dictionary": {"preset": "pendulum23"},
  "sabc": {
    "n_particles": 400, "alpha": 0.05, "eta": 0.9, "k_max": 5, "seed": 1,
    "prior": {"scheme": "uniform", "a": 1},
    "lambda": {"scale": 0.2, "relative_to_prior": false},
    "beta": 1,
    "rounds": [
      {"epsilon1": 1e5, "epsilon_tol": 0.005},
      {"epsilon1": 60, "epsilon_tol": 0.001, "gamma": 4}
    ]
  },
  "truth": "dataset",
  "output": "runs/pendulum-paper"
}
)"},
        {"linear-paper", R"({
  "dataset": {"benchmark": "linear", "noise": 0.02, "seed": 1},
  "dictionary": {"preset": "oscillator21"},
  "sabc": {
    "n_particles": 400, "alpha": 0.05, "eta": 0.9, "k_max": 5, "seed": 1,
    "prior": {"scheme": "informed"},
    "lambda": {"scale": 0.2, "relative_to_prior": true},
    "rounds": [
      {"epsilon1": 1e5, "epsilon_tol": 0.005, "beta": 0.05},
      {"epsilon1": 20, "epsilon_tol": 1e-5, "beta": 0.05, "gamma": 2}
    ]
  },
  "truth": "dataset",
  "output": "runs/linear-paper"
}
)"},
        {"duffing-paper", R"({
  "dataset": {"benchmark": "duffing", "noise": 0.02, "seed": 1},
  "dictionary": {"preset": "oscillator21"},
  "sabc": {
    "n_particles": 400, "alpha": 0.05, "eta": 0.9, "k_max": 5, "seed": 1,
    "prior": {"scheme": "informed"},
    "lambda": {"scale": 0.2, "relative_to_prior": true},
    "rounds": [
      {"epsilon1": 1e5, "epsilon_tol": 0.005, "beta": 0.05},
      {"epsilon1": 20, "epsilon_tol": 1e-5, "beta": 0.5, "gamma": 2}
    ]
  },
  "truth": "dataset",
  "output": "runs/duffing-paper"
}
)"},
        {"viscous-paper", R"({
  "dataset": {"benchmark": "viscous", "noise": 0.02, "seed": 1},
  "dictionary": {"preset": "oscillator21"},
  "sabc": {
    "n_particles": 400, "alpha": 0.05, "eta": 0.9, "k_max": 5, "seed": 1,
    "prior": {"scheme": "informed"},
    "lambda": {"scale": 0.2, "relative_to_prior": true},
    "rounds": [
      {"epsilon1": 1e5, "epsilon_tol": 0.001, "beta": 0.05},
      {"epsilon1": 50, "epsilon_tol": 1e-5, "beta": 0.005, "gamma": 2}
    ]
  },
  "truth": "dataset",
  "output": "runs/viscous-paper"
}
)"},
    };
    return table;
}

}  // namespace

RunConfigFile parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir)
{
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("config: ") + e.what());
    }
    const Node root(doc, "");
    root.allow_only({"dataset", "dictionary", "sabc", "truth", "output"});

    RunConfigFile out;
    const Node ds = root.at("dataset");
    ds.require_object();
    if (ds.has("path")) {
        ds.allow_only({"path"});
        out.dataset.path = resolve(base_dir, ds.at("path").string());
    } else {
        ds.allow_only({"benchmark", "noise", "seed"});
        out.dataset.benchmark = ds.at("benchmark").string();
        const auto names = benchmark_names();
        if (std::find(names.begin(), names.end(), out.dataset.benchmark) == names.end()) {
            ds.at("benchmark").fail("names an unknown benchmark");
        }
        ds.opt("noise", [&](const Node& v) {
            out.dataset.noise = v.number();
            if (!(out.dataset.noise >= 0.0)) v.fail("must be >= 0");
        });
        ds.opt("seed", [&](const Node& v) { out.dataset.seed = v.unsigned_int(); });
    }

    const Node dn = root.at("dictionary");
    if (dn.raw().is_string()) {
        out.dictionary_name = dn.string();
        out.dictionary = Dictionary::preset(out.dictionary_name);
    } else if (dn.has("preset")) {
        dn.allow_only({"preset"});
        out.dictionary_name = dn.at("preset").string();
        out.dictionary = Dictionary::preset(out.dictionary_name);
    } else {
        dn.allow_only({"terms"});
        const Node terms = dn.at("terms");
        if (!terms.raw().is_array() || terms.raw().empty()) terms.fail("must be a non-empty array of labels");
        std::vector<std::string> labels;
        for (std::size_t i = 0; i < terms.raw().size(); ++i) {
            labels.push_back(Node(terms.raw()[i], terms.path() + "[" + std::to_string(i) + "]").string());
        }
        out.dictionary = Dictionary::from_labels(labels);
        out.dictionary_name = "custom";
    }

    if (root.has("sabc")) out.sabc = parse_sabc(root.at("sabc"), out.substeps_given);

    root.opt("truth", [&](const Node& t) {
        if (t.raw().is_string()) {
            if (t.string() != "dataset") t.fail("must be \"dataset\" or a term -> coefficient object");
            out.truth_from_dataset = true;
            return;
        }
        t.require_object();
        std::vector<std::pair<std::string, double>> terms;
        for (const auto& [k, v] : t.raw().items()) terms.emplace_back(k, Node(v, t.path() + "." + k).number());
        out.truth = terms;
    });

    out.output = resolve(base_dir, root.has("output") ? root.at("output").string() : std::string("sabc-out"));

    if (out.sabc.lambda.values.size() > 0 && out.sabc.lambda.values.size() != out.dictionary.size()) {
        throw InputError("config: 'sabc.lambda' has " + std::to_string(out.sabc.lambda.values.size()) +
                         " entries but the dictionary has " + std::to_string(out.dictionary.size()) + " terms");
    }
    out.sabc.validate();
    if (out.truth) resolve_truth(out.dictionary, *out.truth);
    return out;
}

RunConfigFile load_run_config(const std::filesystem::path& path)
{
    if (!std::filesystem::exists(path)) throw InputError("config file not found: " + path.string());
    return parse_run_config(read_text(path), path.parent_path());
}

Dataset resolve_dataset(RunConfigFile& cfg)
{
    Dataset data = cfg.dataset.path ? read_dataset(*cfg.dataset.path)
                                    : generate_benchmark(cfg.dataset.benchmark, cfg.dataset.noise, cfg.dataset.seed);
    if (!cfg.substeps_given) cfg.sabc.sim.substeps = default_substeps(data.dt());
    if (cfg.truth_from_dataset) {
        if (data.truth_coefficients.empty()) throw InputError("config: truth \"dataset\" but the dataset carries none");
        cfg.truth = data.truth_coefficients;
        resolve_truth(cfg.dictionary, *cfg.truth);
    }
    return data;
}

std::vector<std::string> preset_names()
{
    std::vector<std::string> out;
    for (const auto& [k, _] : presets()) out.push_back(k);
    return out;
}

std::string preset_config(const std::string& name)
{
    const auto it = presets().find(name);
    if (it == presets().end()) throw InputError("unknown preset '" + name + "'");
    return it->second;
}

}  // namespace sabc
