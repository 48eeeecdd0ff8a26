#include "ckn/params.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ckn/errors.hpp"

namespace ckn {

CknParams CknParams::make(int N, double p, double a, double b)
{
    if (N < 1)
        throw InvalidArgument("dimension N must be >= 1, got " + std::to_string(N));
    if (!(p > 1.0) || !std::isfinite(p))
        throw InvalidArgument("exponent p must be a finite real > 1");
    if (!std::isfinite(a) || !std::isfinite(b))
        throw InvalidArgument("weight exponents a, b must be finite");
    return CknParams{N, p, a, b};
}

std::string CknParams::describe() const
{
    std::ostringstream os;
    os.precision(17);
    os << "N=" << N << " p=" << p << " a=" << a << " b=" << b;
    return os.str();
}

bool operator==(const CknParams& lhs, const CknParams& rhs)
{
    return lhs.N == rhs.N && lhs.p == rhs.p && lhs.a == rhs.a && lhs.b == rhs.b;
}

std::string_view to_string(Region region)
{
    switch (region) {
    case Region::P1: return "P1";
    case Region::P2: return "P2";
    case Region::Q1: return "Q1";
    case Region::Q2: return "Q2";
    case Region::Diagonal: return "Diagonal";
    case Region::Other: return "Other";
    }
    return "Other";
}

Region classify_region(int N, double a, double b)
{
    const double s = b - a + 1.0;
    const double edge = (N - 2) / 2.0;
    if (std::isnan(s) || std::isnan(b))
        return Region::Other;
    if (s == 0.0)
        return Region::Diagonal;
    if (s > 0.0)
        return b <= edge ? Region::P1 : Region::Q2;
    return b >= edge ? Region::P2 : Region::Q1;
}

bool also_in_q(int N, double a, double b)
{
    const double s = b - a + 1.0;
    const double edge = (N - 2) / 2.0;
    if (s > 0.0)
        return b >= edge;
    if (s < 0.0)
        return b <= edge;
    return false;
}

double sharp_constant_l2(int N, double a, double b)
{
    const Region region = classify_region(N, a, b);
    if (is_p_region(region))
        return std::abs(N - (a + b + 1.0)) / 2.0;
    if (is_q_region(region))
        return std::abs(N - (3.0 * b - a + 3.0)) / 2.0;
    if (region == Region::Diagonal)
        return std::abs(N - 2.0 * (b + 1.0)) / 2.0;
    return std::nan("");
}

double sharp_constant_lp(const CknParams& params)
{
    return std::abs(params.scaling_defect()) / params.p;
}

std::string_view to_string(TheoremId id)
{
    switch (id) {
    case TheoremId::Thm1: return "thm1";
    case TheoremId::Thm2: return "thm2";
    case TheoremId::Thm3: return "thm3";
    case TheoremId::Thm4: return "thm4";
    case TheoremId::Thm5: return "thm5";
    case TheoremId::Thm6: return "thm6";
    case TheoremId::ThmC: return "thmc";
    }
    return "?";
}

TheoremId theorem_from_string(std::string_view name)
{
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (TheoremId id : {TheoremId::Thm1, TheoremId::Thm2, TheoremId::Thm3, TheoremId::Thm4,
                         TheoremId::Thm5, TheoremId::Thm6, TheoremId::ThmC}) {
        if (lower == to_string(id))
            return id;
    }
    throw InvalidArgument("unknown theorem '" + std::string(name) + "'");
}

bool approx_equal(double x, double y, double rel_tol)
{
    if (x == y)
        return true;
    return std::abs(x - y) <= rel_tol * std::max(std::abs(x), std::abs(y));
}

namespace {

// N > p is implied by 0 <= b < (N-p)/p, but listing it separately keeps the
// report aligned with the theorem statements.
double critical_b(const CknParams& q) { return (q.N - q.p) / q.p; }

HypothesisCheck b_window(const CknParams& q)
{
    return {"0<=b<(N-p)/p", q.b >= 0.0 && q.b < critical_b(q)};
}

// a = Nb/(N-p); meaningless for N == p, reported as false there.
double balanced_a(const CknParams& q) { return q.N * q.b / (q.N - q.p); }

} // namespace

std::vector<HypothesisCheck> check_hypotheses(TheoremId theorem, const CknParams& q)
{
    const bool n_above_p = q.N > q.p;
    std::vector<HypothesisCheck> out;
    switch (theorem) {
    case TheoremId::Thm1:
    case TheoremId::Thm3:
        out.push_back({"N>2", q.N > 2});
        out.push_back({"1<p<2", q.p > 1.0 && q.p < 2.0});
        out.push_back(b_window(q));
        out.push_back({"a=Nb/(N-p)", n_above_p && approx_equal(q.a, balanced_a(q))});
        break;
    case TheoremId::Thm2:
    case TheoremId::Thm4:
        out.push_back({"N>p", n_above_p});
        out.push_back({"p>=2", q.p >= 2.0});
        out.push_back(b_window(q));
        out.push_back({"a=Nb/(N-p)", n_above_p && approx_equal(q.a, balanced_a(q))});
        break;
    case TheoremId::Thm5:
    case TheoremId::ThmC: {
        if (theorem == TheoremId::Thm5)
            out.push_back({"N>p", n_above_p});
        out.push_back({"p>=2", q.p >= 2.0});
        out.push_back(b_window(q));
        const bool below = n_above_p && q.a < balanced_a(q) && !approx_equal(q.a, balanced_a(q));
        out.push_back({"a<Nb/(N-p)", below});
        const bool link = n_above_p &&
            approx_equal(q.mixed_weight(), q.p * q.b * q.N / (q.N - q.p));
        out.push_back({"(p-1)a+b+1=pbN/(N-p)", link});
        break;
    }
    case TheoremId::Thm6:
        out.push_back({"N>=1", q.N >= 1});
        out.push_back({"p>1", q.p > 1.0});
        out.push_back({"b-a+1>0", q.manifold_exponent() > 0.0});
        out.push_back({"b<=(N-p)/p",
                       q.b <= critical_b(q) || approx_equal(q.b, critical_b(q))});
        break;
    }
    return out;
}

bool hypotheses_hold(TheoremId theorem, const CknParams& params)
{
    const auto checks = check_hypotheses(theorem, params);
    return std::all_of(checks.begin(), checks.end(),
                       [](const HypothesisCheck& c) { return c.holds; });
}

bool identity_hypotheses_hold(const CknParams& params)
{
    return hypotheses_hold(TheoremId::Thm6, params);
}

} // namespace ckn
