#include "ckn/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ckn/errors.hpp"
#include "ckn/manifold.hpp"
#include "ckn/report.hpp"
#include "ckn/vectorineq.hpp"

namespace ckn::cli {

namespace {

using nlohmann::json;

std::string trim(std::string s)
{
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::string where(const std::string& source, int line) { return source + ":" + std::to_string(line) + ": "; }

[[noreturn]] void bad_value(const std::string& source, const IniEntry& e, const std::string& expected)
{
    throw ConfigError(where(source, e.line) + "field '" + e.key + "' in [" + e.section + "]: expected " + expected +
                      ", got '" + e.value + "'");
}

double to_double(const std::string& source, const IniEntry& e)
{
    double v = 0.0;
    const char* end = e.value.data() + e.value.size();
    const auto res = std::from_chars(e.value.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end)
        bad_value(source, e, "a number");
    return v;
}

long long to_int(const std::string& source, const IniEntry& e)
{
    long long v = 0;
    const char* end = e.value.data() + e.value.size();
    const auto res = std::from_chars(e.value.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end)
        bad_value(source, e, "an integer");
    return v;
}

bool to_bool(const std::string& source, const IniEntry& e)
{
    if (e.value == "true" || e.value == "1" || e.value == "yes")
        return true;
    if (e.value == "false" || e.value == "0" || e.value == "no")
        return false;
    bad_value(source, e, "true or false");
}

std::vector<double> to_list(const std::string& source, const IniEntry& e)
{
    std::vector<double> out;
    std::stringstream ss(e.value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        IniEntry one = e;
        one.value = trim(item);
        out.push_back(to_double(source, one));
    }
    if (out.empty())
        bad_value(source, e, "a comma separated list of numbers");
    return out;
}

// "all" or "r0:R0,r1:R1".
void parse_domain(PoincareConfig& pc, const std::string& source, const IniEntry& e)
{
    pc.annuli.clear();
    pc.all = e.value == "all";
    if (pc.all)
        return;
    std::stringstream ss(e.value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            bad_value(source, e, "'all' or a list lo:hi,lo:hi");
        IniEntry lo = e;
        IniEntry hi = e;
        lo.value = trim(item.substr(0, colon));
        hi.value = trim(item.substr(colon + 1));
        pc.annuli.emplace_back(to_double(source, lo), to_double(source, hi));
    }
    if (pc.annuli.empty())
        bad_value(source, e, "'all' or a list lo:hi,lo:hi");
}

std::vector<PoincareConfig> default_poincare()
{
    struct Tuple {
        double p, rho, sigma, theta, lam;
    };
    const Tuple tuples[] = {{2.0, 0.0, 1.0, 1.0, 1.0},
                            {2.0, 0.5, 2.0, 1.0, 0.5},
                            {1.5, 0.0, 1.0, 1.0, 1.0},
                            {1.5, 0.5, 2.0, 1.2, 1.7}};
    std::vector<PoincareConfig> out;
    for (const Tuple& t : tuples)
        for (int d = 0; d < 3; ++d) {
            PoincareConfig pc{t.p, t.rho, t.sigma, t.theta, t.lam, {}, d == 0};
            if (d == 1)
                pc.annuli = {{1.0, 2.0}};
            if (d == 2)
                pc.annuli = {{0.5, 1.0}, {2.0, 3.0}};
            out.push_back(pc);
        }
    return out;
}

std::vector<RadialProfile> poincare_profiles()
{
    RadialProfile gauss = extremal_profile(CknParams::make(3, 2.0, 0.0, 1.0), 1.0, 1.0);
    gauss.set_label("gauss");
    return {unit_bump(0.5, 2.5), extremal_profile(CknParams::make(3, 2.0, 0.0, 0.0), 1.0, 1.0), gauss,
            dipole_profile(), power_profile(1.0)};
}

// Report ---------------------------------------------------------------------

struct Report {
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;
    json summary = json::object();
};

std::string cell_text(const json& v)
{
    if (v.is_null())
        return "";
    if (v.is_string())
        return v.get<std::string>();
    if (v.is_number_float())
        return fmt(v.get<double>());
    return v.dump();
}

// Non-finite values have no JSON spelling; keep them as strings.
json finite_or_text(double x)
{
    return std::isfinite(x) ? json(x) : json(fmt(x));
}

std::string utc_now()
{
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_report(const RunConfig& cfg, const Report& rep, std::ostream& os)
{
    if (cfg.format == "json") {
        json j;
        j["command"] = cfg.command;
        if (cfg.timestamp)
            j["generated"] = utc_now();
        j["seed"] = cfg.seed;
        j["summary"] = rep.summary;
        j["rows"] = json::array();
        for (const auto& r : rep.rows) {
            json o = json::object();
            for (std::size_t i = 0; i < rep.columns.size(); ++i)
                o[rep.columns[i]] = r[i].is_number_float() ? finite_or_text(r[i].get<double>()) : r[i];
            j["rows"].push_back(std::move(o));
        }
        os << j.dump(2) << '\n';
        return;
    }
    if (cfg.timestamp)
        os << "# generated " << utc_now() << '\n';
    CsvTable table(rep.columns);
    for (const auto& r : rep.rows) {
        std::vector<std::string> cells;
        for (const json& v : r)
            cells.push_back(cell_text(v));
        table.add(std::move(cells));
    }
    table.write(os);
}

std::vector<json> params_cells(const CknParams& q) { return {q.N, q.p, q.a, q.b}; }

void append(std::vector<json>& row, const std::vector<json>& more) { row.insert(row.end(), more.begin(), more.end()); }

json summary(int pass, int fail, std::optional<double> min_ratio, int excluded)
{
    json s;
    s["pass_count"] = pass;
    s["fail_count"] = fail;
    s["min_ratio"] = min_ratio ? finite_or_text(*min_ratio) : json(nullptr);
    s["excluded_count"] = excluded;
    return s;
}

// Commands -------------------------------------------------------------------

int cmd_verify(const RunConfig& cfg, Report& rep, std::ostream& log)
{
    const Corpus corpus = build_default_corpus(cfg.params_sets, cfg.seed);
    const IdentityReport ir = verify_identities(corpus, cfg.scheme, cfg.exec());
    rep.columns = {"N", "p", "a", "b", "profile", "kind", "lhs_41", "rhs_41", "residual_41",
                   "lhs_42", "rhs_42", "residual_42", "status", "note"};
    for (const IdentityRow& r : ir.rows) {
        std::vector<json> row = params_cells(r.params);
        append(row, {r.label, corpus.profiles[r.profile_index].kind});
        if (r.skipped)
            append(row, {nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, "skipped"});
        else
            append(row, {r.lhs_41, r.rhs_41, r.residual_41, r.lhs_42, r.rhs_42, r.residual_42,
                         r.passed ? "pass" : "fail"});
        row.push_back(r.note);
        rep.rows.push_back(std::move(row));
    }
    rep.summary = summary(ir.pass_count, ir.fail_count, std::nullopt, ir.skipped_count);
    rep.summary["max_residual"] = ir.max_residual;
    log << "verify-identities: " << ir.rows.size() << " pairs, " << ir.pass_count << " pass, " << ir.fail_count
        << " fail, " << ir.skipped_count << " skipped, max residual " << fmt(ir.max_residual) << '\n';
    return ir.fail_count == 0 && ir.pass_count > 0 ? kExitOk : kExitFailed;
}

int cmd_vector(const RunConfig& cfg, Report& rep, std::ostream& log)
{
    rep.columns = {"p", "check", "checked", "violations", "worst_margin", "c_emp"};
    int pass = 0;
    int fail = 0;
    std::optional<double> min_c;
    auto tally = [&](const ViolationTally& t, json p, json c) {
        rep.rows.push_back({p, t.name, t.checked, t.violations, t.worst_margin, c});
        (t.violations == 0 ? pass : fail)++;
    };
    for (double p : cfg.vector_p) {
        const EmpiricalConstant c = estimate_cp(p, cfg.samples, cfg.seed, cfg.exec());
        min_c = min_c ? std::min(*min_c, c.value) : c.value;
        log << "p=" << fmt(p) << ": c_p = " << fmt(c.value) << " over " << c.sample_count << " samples\n";
        if (p == 2.0) {
            ViolationTally t{"c_p=1 at p=2", 1, std::abs(c.value - 1.0) <= 1e-12 ? 0 : 1, 1.0 - c.value, {}};
            tally(t, p, c.value);
        }
        for (const ViolationTally& t :
             scan_vector_inequalities(p, cfg.gammas, c.value, cfg.samples, cfg.seed + 1, cfg.exec()))
            tally(t, p, c.value);
    }
    for (const ViolationTally& t : scan_lemma_a(cfg.samples, cfg.seed + 2, cfg.exec()))
        tally(t, nullptr, nullptr);
    rep.summary = summary(pass, fail, min_c, 0);
    log << "vector-scan: " << pass << " checks clean, " << fail << " with violations\n";
    return fail == 0 ? kExitOk : kExitFailed;
}

int cmd_constant(const RunConfig& cfg, Report& rep, std::ostream& log)
{
    rep.columns = {"N", "p", "a", "b", "theorem", "profile", "kind", "eps", "deficit", "prefactor",
                   "distance", "c_star", "lam_star", "ratio", "status", "note"};
    int included = 0;
    int excluded = 0;
    int bad = 0;
    std::optional<double> min_ratio;
    ProjectionConfig pcfg;
    pcfg.exec = cfg.exec();
    for (const CknParams& q : cfg.params_sets) {
        const Corpus corpus = build_default_corpus({q}, cfg.seed);
        const StabilityEstimate est = estimate_stability_constant(corpus, q, *cfg.theorem, cfg.scheme, pcfg);
        for (const StabilityRow& r : est.rows) {
            std::vector<json> row = params_cells(q);
            append(row, {std::string(to_string(*cfg.theorem)), r.label, r.kind, r.eps, r.deficit, r.prefactor,
                         r.projection.distance, r.projection.c_star, r.projection.lam_star,
                         r.excluded ? json(nullptr) : json(r.ratio), r.excluded ? "excluded" : "included", r.note});
            rep.rows.push_back(std::move(row));
            if (!r.excluded && !(r.ratio > 0.0))
                ++bad;
        }
        included += est.included_count;
        excluded += est.excluded_count;
        min_ratio = min_ratio ? std::min(*min_ratio, est.value) : est.value;
        log << to_string(*cfg.theorem) << " at " << q.describe() << ": empirical constant " << fmt(est.value)
            << " (witness " << est.witness_label << "), " << est.included_count << " used, " << est.excluded_count
            << " excluded\n";
    }
    rep.summary = summary(included - bad, bad, min_ratio, excluded);
    return bad == 0 ? kExitOk : kExitFailed;
}

int cmd_counterexample(const RunConfig& cfg, Report& rep, std::ostream& log)
{
    rep.columns = {"N", "p", "a", "b", "side", "C", "lam", "claim", "lhs", "rhs", "slack", "holds"};
    int pass = 0;
    int fail = 0;
    ProjectionConfig pcfg;
    pcfg.exec = cfg.exec();
    const RadialProfile u = dipole_profile();
    for (const CknParams& q : cfg.params_sets) {
        const CounterexampleReport cr = counterexample_search(u, q, cfg.c1, cfg.c2, cfg.scheme, pcfg);
        for (const CounterexampleCase& c : cr.cases)
            for (const CertificateStep& s : c.chain) {
                std::vector<json> row = params_cells(q);
                append(row, {c.side, c.C, c.lam, s.claim, s.lhs, s.rhs, s.slack, s.holds});
                rep.rows.push_back(std::move(row));
            }
        const CertificateStep& f = cr.final_claim;
        std::vector<json> row = params_cells(q);
        append(row, {"final", nullptr, cr.cases.empty() ? json(nullptr) : json(cr.cases.front().lam), f.claim, f.lhs,
                     f.rhs, f.slack, f.holds});
        rep.rows.push_back(std::move(row));
        (cr.certified ? pass : fail)++;
        log << "counterexample at " << q.describe() << " with C1=" << fmt(cfg.c1) << ", C2=" << fmt(cfg.c2) << ": "
            << (cr.certified ? "certified" : "NOT certified") << ", slack " << fmt(f.slack) << '\n';
    }
    rep.summary = summary(pass, fail, std::nullopt, 0);
    return fail == 0 ? kExitOk : kExitFailed;
}

int cmd_poincare(const RunConfig& cfg, Report& rep, std::ostream& log)
{
    rep.columns = {"check", "profile", "p", "rho", "sigma", "theta", "lam", "domain", "lhs", "rhs_core",
                   "c_star", "ratio", "rel_diff", "status"};
    int pass = 0;
    int fail = 0;
    std::optional<double> min_ratio;
    const int N = cfg.poincare_N;
    for (const RadialProfile& f : poincare_profiles()) {
        for (const PoincareConfig& pc : cfg.poincare) {
            const PoincareScaling s = poincare_scaling_check(f, pc, N, cfg.scheme);
            const bool ok = s.original.passed && s.passed;
            rep.rows.push_back({"poincare", f.label(), pc.p, pc.rho, pc.sigma, pc.theta, pc.lam, pc.domain_text(),
                                s.original.lhs, s.original.rhs_core, s.original.c_star, s.original.ratio, s.rel_diff,
                                ok ? "pass" : "fail"});
            (ok ? pass : fail)++;
            if (std::isfinite(s.original.ratio))
                min_ratio = min_ratio ? std::min(*min_ratio, s.original.ratio) : s.original.ratio;
        }
        if (f.decay().kind == Decay::Kind::Algebraic) {
            // int f(s) s^{N-1} ds diverges for a growing profile.
            rep.rows.push_back({"change-of-variables", f.label(), nullptr, nullptr, nullptr, nullptr, 2.0, "all",
                                nullptr, nullptr, nullptr, nullptr, nullptr, "skipped"});
            continue;
        }
        const ChangeOfVariablesReport cv = change_of_variables_check(f, 2.0, N, cfg.scheme);
        rep.rows.push_back({"change-of-variables", f.label(), nullptr, nullptr, nullptr, nullptr, 2.0, "all", cv.lhs,
                            cv.rhs, nullptr, nullptr, cv.rel_diff, cv.passed ? "pass" : "fail"});
        (cv.passed ? pass : fail)++;
    }
    rep.summary = summary(pass, fail, min_ratio, 0);
    log << "poincare: " << pass << " pass, " << fail << " fail";
    if (min_ratio)
        log << ", smallest ratio " << fmt(*min_ratio);
    log << '\n';
    return fail == 0 ? kExitOk : kExitFailed;
}

int cmd_corpus(const RunConfig& cfg, Report& rep, std::ostream& log, json& raw)
{
    const Corpus corpus = build_default_corpus(cfg.params_sets, cfg.seed);
    rep.columns = {"index", "params_index", "N", "p", "a", "b", "kind", "eps", "profile", "integrability"};
    int issues = 0;
    raw = corpus.to_json();
    for (const auto& [i, j] : corpus.pairs()) {
        const CorpusEntry& e = corpus.profiles[i];
        const auto issue = integrability_issue(e.profile, corpus.params_sets[j], cfg.scheme);
        std::vector<json> row = {i, j};
        append(row, params_cells(corpus.params_sets[j]));
        append(row, {e.kind, e.eps, e.profile.label(), issue ? *issue : "ok"});
        rep.rows.push_back(std::move(row));
        raw["profiles"][i]["integrability"] = issue ? *issue : "ok";
        if (issue)
            ++issues;
    }
    rep.summary = summary(static_cast<int>(rep.rows.size()) - issues, issues, std::nullopt, 0);
    log << "corpus-dump: " << corpus.profiles.size() << " profiles, " << rep.rows.size() << " pairs, " << issues
        << " integrability issues\n";
    return issues == 0 ? kExitOk : kExitFailed;
}

} // namespace

// Config ---------------------------------------------------------------------

std::vector<IniEntry> parse_ini(const std::string& text, const std::string& source)
{
    std::vector<IniEntry> out;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = trim(raw);
        if (s.empty() || s[0] == '#' || s[0] == ';')
            continue;
        if (s.front() == '[') {
            if (s.back() != ']' || s.size() < 3)
                throw ConfigError(where(source, line) + "malformed section header '" + s + "'");
            section = trim(s.substr(1, s.size() - 2));
            out.push_back({section, "", "", line}); // marks the start of a section
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where(source, line) + "expected 'key = value', got '" + s + "'");
        IniEntry e{section, trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line};
        if (e.key.empty())
            throw ConfigError(where(source, line) + "missing key before '='");
        if (section.empty())
            throw ConfigError(where(source, line) + "key '" + e.key + "' appears before any [section]");
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<std::string> preset_names()
{
    return {"thm1-default", "thm2-default", "thm2-lp",      "thm3-default", "thm4-default", "thm5-default",
            "thmc-default", "thm6-default", "cor7",         "q-region",     "identity-suite"};
}

void apply_preset(RunConfig& cfg, const std::string& name)
{
    const CknParams thm1 = CknParams::make(3, 1.5, 4.0 / 3.0, 2.0 / 3.0);
    const CknParams hydrogen = CknParams::make(3, 2.0, 0.0, 0.0);
    const CknParams lp = CknParams::make(5, 2.5, 1.0, 0.5);
    const CknParams below = CknParams::make(4, 2.0, 1.0, 2.0 / 3.0);
    cfg.preset = name;
    cfg.theorem.reset();
    if (name == "thm1-default") {
        cfg.params_sets = {thm1};
        cfg.theorem = TheoremId::Thm1;
    } else if (name == "thm3-default") {
        cfg.params_sets = {thm1};
        cfg.theorem = TheoremId::Thm3;
    } else if (name == "thm2-default" || name == "cor7") {
        cfg.params_sets = {hydrogen};
        cfg.theorem = TheoremId::Thm2;
    } else if (name == "thm2-lp") {
        cfg.params_sets = {lp};
        cfg.theorem = TheoremId::Thm2;
    } else if (name == "thm4-default") {
        cfg.params_sets = {hydrogen};
        cfg.theorem = TheoremId::Thm4;
    } else if (name == "thm5-default") {
        cfg.params_sets = {below};
        cfg.theorem = TheoremId::Thm5;
    } else if (name == "thmc-default") {
        cfg.params_sets = {below};
        cfg.theorem = TheoremId::ThmC;
    } else if (name == "thm6-default") {
        cfg.params_sets = {hydrogen, thm1, lp};
    } else if (name == "q-region") {
        cfg.params_sets = {CknParams::make(4, 2.0, 1.5, 1.5)};
    } else if (name == "identity-suite") {
        cfg.params_sets = {thm1, hydrogen, lp};
    } else {
        std::string known;
        for (const auto& n : preset_names())
            known += (known.empty() ? "" : ", ") + n;
        throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
    }
}

void apply_entries(RunConfig& cfg, const std::vector<IniEntry>& entries, const std::string& source)
{
    bool params_started = false;
    bool poincare_started = false;
    CknParams* current = nullptr;
    PoincareConfig* pc = nullptr;
    auto unknown = [&](const IniEntry& e) {
        throw ConfigError(where(source, e.line) + "unknown key '" + e.key + "' in [" + e.section + "]");
    };
    for (const IniEntry& e : entries) {
        if (e.key.empty()) {
            if (e.section == "params") {
                if (!params_started)
                    cfg.params_sets.clear();
                params_started = true;
                cfg.params_sets.push_back(CknParams{});
                current = &cfg.params_sets.back();
            } else if (e.section == "poincare") {
                if (!poincare_started)
                    cfg.poincare.clear();
                poincare_started = true;
                cfg.poincare.push_back(PoincareConfig{});
                pc = &cfg.poincare.back();
            } else if (e.section != "run" && e.section != "scheme" && e.section != "vector" &&
                       e.section != "stability" && e.section != "counterexample") {
                throw ConfigError(where(source, e.line) + "unknown section [" + e.section + "]");
            }
            continue;
        }
        if (e.section == "run") {
            if (e.key == "command") {
                if (std::find(commands().begin(), commands().end(), e.value) == commands().end())
                    bad_value(source, e, "a known command");
                cfg.command = e.value;
            } else if (e.key == "output") {
                cfg.output_path = e.value;
            } else if (e.key == "format") {
                if (e.value != "csv" && e.value != "json")
                    bad_value(source, e, "csv or json");
                cfg.format = e.value;
            } else if (e.key == "seed") {
                const long long v = to_int(source, e);
                if (v < 0)
                    bad_value(source, e, "a non-negative integer");
                cfg.seed = static_cast<std::uint64_t>(v);
            } else if (e.key == "jobs") {
                cfg.jobs = static_cast<int>(to_int(source, e));
            } else if (e.key == "timestamp") {
                cfg.timestamp = to_bool(source, e);
            } else if (e.key == "preset") {
                // handled before the entries are applied
            } else {
                unknown(e);
            }
        } else if (e.section == "scheme") {
            if (e.key == "rel_tol")
                cfg.scheme.rel_tol = to_double(source, e);
            else if (e.key == "r_min")
                cfg.scheme.r_min = to_double(source, e);
            else if (e.key == "nodes_per_panel")
                cfg.scheme.nodes_per_panel = static_cast<int>(to_int(source, e));
            else if (e.key == "panels_per_decade")
                cfg.scheme.panels_per_decade = static_cast<int>(to_int(source, e));
            else if (e.key == "max_depth")
                cfg.scheme.max_depth = static_cast<int>(to_int(source, e));
            else
                unknown(e);
        } else if (e.section == "params") {
            if (e.key == "N")
                current->N = static_cast<int>(to_int(source, e));
            else if (e.key == "p")
                current->p = to_double(source, e);
            else if (e.key == "a")
                current->a = to_double(source, e);
            else if (e.key == "b")
                current->b = to_double(source, e);
            else
                unknown(e);
        } else if (e.section == "vector") {
            if (e.key == "p")
                cfg.vector_p = to_list(source, e);
            else if (e.key == "samples")
                cfg.samples = to_int(source, e);
            else if (e.key == "gammas")
                cfg.gammas = to_list(source, e);
            else
                unknown(e);
        } else if (e.section == "stability") {
            if (e.key != "theorem")
                unknown(e);
            try {
                cfg.theorem = theorem_from_string(e.value);
            } catch (const Error&) {
                bad_value(source, e, "a theorem name");
            }
        } else if (e.section == "counterexample") {
            if (e.key == "c1")
                cfg.c1 = to_double(source, e);
            else if (e.key == "c2")
                cfg.c2 = to_double(source, e);
            else
                unknown(e);
        } else if (e.section == "poincare") {
            if (e.key == "N")
                cfg.poincare_N = static_cast<int>(to_int(source, e));
            else if (e.key == "p")
                pc->p = to_double(source, e);
            else if (e.key == "rho")
                pc->rho = to_double(source, e);
            else if (e.key == "sigma")
                pc->sigma = to_double(source, e);
            else if (e.key == "theta")
                pc->theta = to_double(source, e);
            else if (e.key == "lam")
                pc->lam = to_double(source, e);
            else if (e.key == "domain")
                parse_domain(*pc, source, e);
            else
                unknown(e);
        }
    }
    for (std::size_t i = 0; i < cfg.params_sets.size(); ++i) {
        const CknParams& q = cfg.params_sets[i];
        try {
            cfg.params_sets[i] = CknParams::make(q.N, q.p, q.a, q.b);
        } catch (const Error& err) {
            throw ConfigError(source + ": [params] block " + std::to_string(i + 1) + ": " + err.what());
        }
    }
}

void validate(const RunConfig& cfg)
{
    if (cfg.command.empty())
        throw ConfigError("no command given");
    if (std::find(commands().begin(), commands().end(), cfg.command) == commands().end())
        throw ConfigError("unknown command '" + cfg.command + "'");
    const bool needs_params = cfg.command != "vector-scan" && cfg.command != "poincare";
    if (needs_params && cfg.params_sets.empty())
        throw ConfigError(cfg.command + " needs parameters: use --preset or a [params] section");
    if (cfg.command == "estimate-constant" && !cfg.theorem)
        throw ConfigError("estimate-constant needs a theorem: --theorem or [stability] theorem");
    if (cfg.command == "estimate-constant" && *cfg.theorem == TheoremId::Thm6)
        throw ConfigError("thm6 has no stability constant; use the counterexample command");
    if (cfg.command == "vector-scan") {
        if (cfg.vector_p.empty())
            throw ConfigError("vector-scan needs at least one p");
        if (cfg.samples < kMinCpSamples)
            throw ConfigError("vector-scan needs samples >= " + std::to_string(kMinCpSamples));
    }
    if (cfg.command == "poincare") {
        if (cfg.poincare.empty())
            throw ConfigError("poincare needs at least one [poincare] block");
        for (const PoincareConfig& pc : cfg.poincare) {
            try {
                pc.validate(cfg.poincare_N);
            } catch (const Error& e) {
                throw ConfigError(std::string("[poincare] ") + e.what());
            }
        }
    }
    if (cfg.command == "counterexample" && !(cfg.c1 >= 0.0 && cfg.c2 >= 0.0 && cfg.c1 + cfg.c2 > 0.0))
        throw ConfigError("counterexample needs c1, c2 >= 0 with c1 + c2 > 0");
    if (cfg.format != "csv" && cfg.format != "json")
        throw ConfigError("format must be csv or json");
    if (!(cfg.scheme.rel_tol > 0.0))
        throw ConfigError("rel-tol must be > 0");
    if (cfg.jobs < 0)
        throw ConfigError("jobs must be >= 0");
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& log)
{
    validate(cfg);
    Report rep;
    json raw;
    int status = kExitOk;
    if (cfg.command == "verify-identities")
        status = cmd_verify(cfg, rep, log);
    else if (cfg.command == "vector-scan")
        status = cmd_vector(cfg, rep, log);
    else if (cfg.command == "estimate-constant")
        status = cmd_constant(cfg, rep, log);
    else if (cfg.command == "counterexample")
        status = cmd_counterexample(cfg, rep, log);
    else if (cfg.command == "poincare")
        status = cmd_poincare(cfg, rep, log);
    else
        status = cmd_corpus(cfg, rep, log, raw);

    std::ofstream file;
    std::ostream* os = &out;
    if (!cfg.output_path.empty()) {
        file.open(cfg.output_path, std::ios::binary);
        if (!file)
            throw ConfigError("cannot write '" + cfg.output_path + "'");
        os = &file;
    }
    if (cfg.command == "corpus-dump" && cfg.format == "json") {
        if (cfg.timestamp)
            raw["generated"] = utc_now();
        *os << raw.dump(2) << '\n';
    } else {
        write_report(cfg, rep, *os);
    }
    return status;
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Numerical checks for the first-order L^p Caffarelli-Kohn-Nirenberg inequalities"};
    std::string command;
    std::string config_path;
    std::optional<std::string> preset, output, format, theorem;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    std::optional<double> rel_tol, c1, c2;
    std::optional<std::int64_t> samples;
    std::vector<double> p_list, gammas;
    bool no_timestamp = false;

    app.add_option("command", command, "one of: verify-identities, vector-scan, estimate-constant, "
                                       "counterexample, poincare, corpus-dump")
        ->check(CLI::IsMember(commands()));
    app.add_option("--config", config_path, "flat INI file with [run], [params], [scheme], ... sections");
    app.add_option("--preset", preset, "named parameter preset");
    app.add_option("--output", output, "report path (default: stdout)");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--seed", seed, "corpus and sampling seed");
    app.add_option("--jobs", jobs, "worker cap (1 runs the serial reference loops)")->check(CLI::NonNegativeNumber);
    app.add_option("--rel-tol", rel_tol, "quadrature relative tolerance")->check(CLI::PositiveNumber);
    app.add_flag("--no-timestamp", no_timestamp, "omit the timestamp line from the report");
    app.add_option("--p", p_list, "vector-scan exponents")->delimiter(',');
    app.add_option("--samples", samples, "vector-scan samples per p");
    app.add_option("--gamma", gammas, "vector-scan gamma values")->delimiter(',');
    app.add_option("--theorem", theorem, "estimate-constant theorem (thm1 ... thm5, thmc)");
    app.add_option("--c1", c1, "counterexample gradient constant");
    app.add_option("--c2", c2, "counterexample mass constant");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitConfig;
    }

    RunConfig cfg;
    cfg.poincare = default_poincare();
    try {
        std::vector<IniEntry> entries;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in)
                throw ConfigError("cannot read config '" + config_path + "'");
            std::stringstream ss;
            ss << in.rdbuf();
            entries = parse_ini(ss.str(), config_path);
        }
        // Preset first, then the file, then flags.
        std::optional<std::string> preset_name = preset;
        if (!preset_name)
            for (const IniEntry& e : entries)
                if (e.section == "run" && e.key == "preset")
                    preset_name = e.value;
        if (preset_name)
            apply_preset(cfg, *preset_name);
        apply_entries(cfg, entries, config_path);
        if (!command.empty())
            cfg.command = command;
        if (output)
            cfg.output_path = *output;
        if (format)
            cfg.format = *format;
        if (seed)
            cfg.seed = *seed;
        if (jobs)
            cfg.jobs = *jobs;
        if (rel_tol)
            cfg.scheme.rel_tol = *rel_tol;
        if (no_timestamp)
            cfg.timestamp = false;
        if (!p_list.empty())
            cfg.vector_p = p_list;
        if (samples)
            cfg.samples = *samples;
        if (!gammas.empty())
            cfg.gammas = gammas;
        if (theorem) {
            try {
                cfg.theorem = theorem_from_string(*theorem);
            } catch (const Error& e) {
                throw ConfigError(std::string("--theorem: ") + e.what());
            }
        }
        if (c1)
            cfg.c1 = *c1;
        if (c2)
            cfg.c2 = *c2;
        validate(cfg);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        std::ostream& log = cfg.output_path.empty() ? err : out;
        return run(cfg, out, log);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << cfg.command << " failed: " << e.what() << '\n';
        return kExitFailed;
    }
}

} // namespace ckn::cli
