// SPDX-License-Identifier: MIT
#include "nlbs/config.hpp"

#include "nlbs/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace nlbs {

using nlohmann::json;

namespace {

const std::vector<std::string> kSections = {"market", "cost", "payoff", "grid", "solver",
                                            "analytic", "output", "sweep", "leland"};

// Typed access to one section; rejects keys it was never asked about.
class Section {
public:
    Section(const json& doc, std::string name) : name_(std::move(name)) {
        if (doc.contains(name_)) {
            node_ = doc.at(name_);
            if (!node_.is_object()) throw ConfigError(name_, "section must be an object");
        } else {
            node_ = json::object();
        }
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return node_.contains(key) && !node_.at(key).is_null();
    }

    double number(const std::string& key) {
        require(key);
        const auto& v = node_.at(key);
        if (!v.is_number()) throw ConfigError(field(key), "expected a number");
        return v.get<double>();
    }

    double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

    std::size_t count(const std::string& key, std::size_t fallback) {
        if (!has(key)) return fallback;
        const auto& v = node_.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0)
            throw ConfigError(field(key), "expected a nonnegative integer");
        return v.get<std::size_t>();
    }

    bool flag(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const auto& v = node_.at(key);
        if (!v.is_boolean()) throw ConfigError(field(key), "expected true or false");
        return v.get<bool>();
    }

    std::string text(const std::string& key, const std::string& fallback) {
        if (!has(key)) return fallback;
        const auto& v = node_.at(key);
        if (!v.is_string()) throw ConfigError(field(key), "expected a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers(const std::string& key) {
        require(key);
        const auto& v = node_.at(key);
        if (!v.is_array()) throw ConfigError(field(key), "expected an array of numbers");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) throw ConfigError(field(key), "expected an array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

    const json& raw(const std::string& key) {
        require(key);
        return node_.at(key);
    }

    std::string field(const std::string& key) const { return name_ + "." + key; }

    void finish() const {
        for (auto it = node_.begin(); it != node_.end(); ++it)
            if (!seen_.count(it.key())) throw ConfigError(field(it.key()), "unknown key");
    }

private:
    void require(const std::string& key) {
        if (!has(key)) throw ConfigError(field(key), "missing");
    }

    std::string name_;
    json node_;
    std::set<std::string> seen_;
};

CostCurve read_curve(const json& v, const std::string& field) {
    if (!v.is_object() || !v.contains("x") || !v.contains("y"))
        throw ConfigError(field, "expected an object with x and y arrays");
    try {
        return {v.at("x").get<std::vector<double>>(), v.at("y").get<std::vector<double>>()};
    } catch (const json::exception&) {
        throw ConfigError(field, "expected an object with x and y arrays");
    }
}

MarketParams read_market(Section& s) {
    MarketParams m;
    const auto sig = s.numbers("sigma");
    m.sigmas = Eigen::Map<const Eigen::VectorXd>(sig.data(), static_cast<Eigen::Index>(sig.size()));
    const auto n = m.sigmas.size();
    const json& rho = s.raw("rho");
    if (rho.is_number()) {
        if (n != 2) throw ConfigError("market.rho", "a scalar rho needs exactly 2 assets");
        m.rho = Eigen::Matrix2d{{1.0, rho.get<double>()}, {rho.get<double>(), 1.0}};
    } else if (rho.is_array()) {
        m.rho.resize(n, n);
        if (static_cast<Eigen::Index>(rho.size()) != n) throw ConfigError("market.rho", "matrix has the wrong size");
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& row = rho.at(static_cast<std::size_t>(i));
            if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
                throw ConfigError("market.rho", "matrix has the wrong size");
            for (Eigen::Index j = 0; j < n; ++j) {
                const auto& e = row.at(static_cast<std::size_t>(j));
                if (!e.is_number()) throw ConfigError("market.rho", "expected numbers");
                m.rho(i, j) = e.get<double>();
            }
        }
    } else {
        throw ConfigError("market.rho", "expected a number or a matrix");
    }
    m.r = s.number("r");
    m.T = s.number("T");
    return m;
}

CostModel read_cost(Section& s) {
    const std::string model = s.text("model", "exponential");
    if (model == "constant") return ConstantCost{s.number("C0")};
    if (model == "exponential") return ExponentialCost{s.number("C0"), s.number("k")};
    if (model == "sampled") {
        SampledCost c;
        c.curve = read_curve(s.raw("curve"), "cost.curve");
        if (s.has("derivative")) c.derivative = read_curve(s.raw("derivative"), "cost.derivative");
        c.lower = s.number("lower");
        c.upper = s.number("upper");
        return c;
    }
    throw ConfigError("cost.model", "expected constant, exponential or sampled");
}

template <class Enum>
Enum choose(const std::string& value, const std::string& field,
            std::initializer_list<std::pair<const char*, Enum>> options) {
    std::string names;
    for (const auto& [name, e] : options) {
        if (value == name) return e;
        names += names.empty() ? name : std::string(", ") + name;
    }
    throw ConfigError(field, "expected one of " + names);
}

json curve_json(const CostCurve& c) {
    return {{"x", c.x}, {"y", c.y}};
}

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

} // namespace

RunConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config", "top level must be an object");
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const auto& k = it.key();
        if (k != "name" && k != "run" && std::find(kSections.begin(), kSections.end(), k) == kSections.end())
            throw ConfigError(k, "unknown section");
    }

    RunConfig c;
    if (doc.contains("name")) {
        if (!doc.at("name").is_string()) throw ConfigError("name", "expected a string");
        c.name = doc.at("name").get<std::string>();
    }

    Scenario raw;
    {
        Section s(doc, "market");
        raw.market = read_market(s);
        s.finish();
    }
    {
        Section s(doc, "cost");
        raw.cost = read_cost(s);
        raw.dt_tc = s.number("dt_tc", 1.0 / 261.0);
        c.solver.cost.prefactor =
            s.flag("paper_verbatim_prefactor", false) ? Prefactor::InverseDt : Prefactor::SqrtDt;
        s.finish();
    }
    {
        Section s(doc, "payoff");
        const auto type = s.text("type", "best_cash_or_nothing");
        if (type != "best_cash_or_nothing") throw ConfigError("payoff.type", "expected best_cash_or_nothing");
        raw.payoff = BestCashOrNothing{s.number("K"), s.number("X")};
        s.finish();
    }
    {
        Section s(doc, "grid");
        raw.grid.coord = choose<Coordinates>(s.text("coord", "log"), "grid.coord",
                                             {{"log", Coordinates::LogPrice}, {"price", Coordinates::Price}});
        const bool has_a = s.has("a");
        const bool has_b = s.has("b");
        if (has_a != has_b) throw ConfigError(has_a ? "grid.b" : "grid.a", "give both bounds or neither");
        if (has_a) {
            raw.grid.lower = s.number("a");
            raw.grid.upper = s.number("b");
        }
        raw.grid.intervals = s.count("nx", 100);
        raw.grid.steps = s.count("nt", 100);
        s.finish();
    }
    {
        Section s(doc, "solver");
        c.solver.tol = s.number("tol", 1e-6);
        if (!(c.solver.tol > 0.0)) throw ConfigError("solver.tol", "tol must be positive");
        c.solver.max_iter = s.count("max_iter", 25);
        if (c.solver.max_iter < 1) throw ConfigError("solver.max_iter", "max_iter must be at least 1");
        c.solver.boundary = choose<BoundaryPolicy>(
            s.text("boundary", "analytic"), "solver.boundary",
            {{"analytic", BoundaryPolicy::Analytic}, {"discounted_payoff", BoundaryPolicy::DiscountedPayoff}});
        c.solver.stencil.mixed =
            s.flag("paper_verbatim_stencil", false) ? MixedStencil::Skewed : MixedStencil::FourCorner;
        c.solver.stencil.first =
            choose<FirstDifference>(s.text("first_difference", "forward"), "solver.first_difference",
                                    {{"forward", FirstDifference::Forward}, {"central", FirstDifference::Central}});
        c.solver.smooth_payoff = s.flag("smooth_payoff", false);
        c.solver.norm = choose<NormKind>(s.text("norm", "induced"), "solver.norm",
                                         {{"induced", NormKind::Induced}, {"entrywise", NormKind::Entrywise}});
        s.finish();
    }
    {
        Section s(doc, "analytic");
        c.analytic_form = s.flag("paper_verbatim", false) ? CbestForm::Alternative : CbestForm::Standard;
        s.finish();
    }
    {
        Section s(doc, "output");
        c.out_dir = s.text("dir", "out");
        c.node_csv = s.flag("node_csv", true);
        s.finish();
    }
    {
        Section s(doc, "sweep");
        c.sweep.dt_max = s.number("dt_max", 0.007);
        c.sweep.dt_min = s.number("dt_min", 7.6e-5);
        c.sweep.count = s.count("count", 100);
        if (!(c.sweep.dt_min > 0.0) || !(c.sweep.dt_max > c.sweep.dt_min))
            throw ConfigError("sweep.dt_min", "need 0 < dt_min < dt_max");
        if (c.sweep.count < 2) throw ConfigError("sweep.count", "need at least 2 points");
        if (s.has("probes")) {
            const json& p = s.raw("probes");
            if (!p.is_array()) throw ConfigError("sweep.probes", "expected a list of [S1, S2] pairs");
            for (const auto& e : p) {
                if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                    throw ConfigError("sweep.probes", "expected a list of [S1, S2] pairs");
                c.sweep.probes.push_back({e[0].get<double>(), e[1].get<double>()});
            }
        }
        s.finish();
    }
    {
        Section s(doc, "leland");
        c.leland.one_d =
            choose<bool>(s.text("mode", "surface"), "leland.mode", {{"surface", false}, {"1d", true}});
        c.leland.sigma = s.number("sigma", c.leland.sigma);
        c.leland.c0 = s.number("C0", c.leland.c0);
        c.leland.dt = s.number("dt", c.leland.dt);
        c.leland.source = choose<LelandSource>(s.text("source", "solve"), "leland.source",
                                               {{"solve", LelandSource::Solve}, {"analytic", LelandSource::Analytic}});
        c.leland.scan.form = choose<DyfForm>(s.text("form", "dense"), "leland.form",
                                             {{"dense", DyfForm::Dense}, {"row_exact", DyfForm::RowExact}});
        c.leland.scan.tol = s.number("tol", 1e-10);
        c.leland.scan.theta_floor = s.number("theta_floor", 1e-14);
        s.finish();
    }

    c.scenario = validate(raw);
    return c;
}

void apply_overrides(json& doc, const std::vector<std::string>& overrides) {
    for (const auto& item : overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError(item, "override must look like key=value");
        const std::string key = item.substr(0, eq);
        const std::string text = item.substr(eq + 1);

        json value = json::parse(text, nullptr, false);
        if (value.is_discarded()) value = text;

        std::string section;
        std::string field;
        if (const auto dot = key.find('.'); dot != std::string::npos) {
            section = key.substr(0, dot);
            field = key.substr(dot + 1);
            if (std::find(kSections.begin(), kSections.end(), section) == kSections.end())
                throw ConfigError(key, "unknown section");
        } else {
            field = key;
            std::vector<std::string> hits;
            for (const auto& sec : kSections)
                if (doc.contains(sec) && doc.at(sec).is_object() && doc.at(sec).contains(field)) hits.push_back(sec);
            if (hits.size() > 1) throw ConfigError(key, "ambiguous key; qualify it with a section");
            if (hits.empty()) throw ConfigError(key, "key not present in any section; qualify it with a section");
            section = hits.front();
        }
        doc[section][field] = value;
    }
}

json read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config", "cannot read " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    json doc = json::parse(buf.str(), nullptr, false);
    if (doc.is_discarded()) throw ConfigError("--config", path + " is not valid JSON");
    return doc;
}

json to_json(const RunConfig& c) {
    const Scenario& s = c.scenario;
    json doc;
    if (!c.name.empty()) doc["name"] = c.name;

    std::vector<double> sig(s.market.sigmas.data(), s.market.sigmas.data() + s.market.sigmas.size());
    doc["market"] = {{"sigma", sig}, {"rho", matrix_json(s.market.rho)}, {"r", s.market.r}, {"T", s.market.T}};

    json cost;
    if (const auto* k = std::get_if<ConstantCost>(&s.cost)) {
        cost = {{"model", "constant"}, {"C0", k->c0}};
    } else if (const auto* e = std::get_if<ExponentialCost>(&s.cost)) {
        cost = {{"model", "exponential"}, {"C0", e->c0}, {"k", e->k}};
    } else {
        const auto& t = std::get<SampledCost>(s.cost);
        cost = {{"model", "sampled"}, {"curve", curve_json(t.curve)}, {"lower", t.lower}, {"upper", t.upper}};
        if (t.derivative) cost["derivative"] = curve_json(*t.derivative);
    }
    cost["dt_tc"] = s.dt_tc;
    cost["paper_verbatim_prefactor"] = c.solver.cost.prefactor == Prefactor::InverseDt;
    doc["cost"] = cost;

    doc["payoff"] = {{"type", "best_cash_or_nothing"}, {"K", s.payoff.cash}, {"X", s.payoff.strike}};
    doc["grid"] = {{"coord", s.grid.coord == Coordinates::LogPrice ? "log" : "price"},
                   {"a", s.grid.lower},
                   {"b", s.grid.upper},
                   {"nx", s.grid.intervals},
                   {"nt", s.grid.steps}};
    doc["solver"] = {
        {"tol", c.solver.tol},
        {"max_iter", c.solver.max_iter},
        {"boundary", c.solver.boundary == BoundaryPolicy::Analytic ? "analytic" : "discounted_payoff"},
        {"paper_verbatim_stencil", c.solver.stencil.mixed == MixedStencil::Skewed},
        {"first_difference", c.solver.stencil.first == FirstDifference::Forward ? "forward" : "central"},
        {"smooth_payoff", c.solver.smooth_payoff},
        {"norm", c.solver.norm == NormKind::Induced ? "induced" : "entrywise"},
    };
    doc["analytic"] = {{"paper_verbatim", c.analytic_form == CbestForm::Alternative}};
    doc["output"] = {{"dir", c.out_dir}, {"node_csv", c.node_csv}};

    json probes = json::array();
    for (const auto& p : c.sweep.probes) probes.push_back({p.s1, p.s2});
    doc["sweep"] = {{"dt_max", c.sweep.dt_max}, {"dt_min", c.sweep.dt_min}, {"count", c.sweep.count},
                    {"probes", probes}};

    json le = {{"mode", c.leland.one_d ? "1d" : "surface"},
               {"source", c.leland.source == LelandSource::Solve ? "solve" : "analytic"},
               {"form", c.leland.scan.form == DyfForm::Dense ? "dense" : "row_exact"},
               {"tol", c.leland.scan.tol},
               {"theta_floor", c.leland.scan.theta_floor}};
    if (std::isfinite(c.leland.sigma)) le["sigma"] = c.leland.sigma;
    if (std::isfinite(c.leland.c0)) le["C0"] = c.leland.c0;
    if (std::isfinite(c.leland.dt)) le["dt"] = c.leland.dt;
    doc["leland"] = le;
    return doc;
}

} // namespace nlbs
