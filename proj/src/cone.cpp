#include "bergman/cone.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bergman/errors.hpp"

namespace bergman {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

template <typename Vec>
std::vector<Vec> split_impl(const ConeDescriptor& cone, const Vec& v)
{
    std::vector<Vec> parts;
    int offset = 0;
    for (const auto& f : cone.factors()) {
        parts.push_back(v.segment(offset, f.dim()));
        offset += f.dim();
    }
    return parts;
}

int spd_dim(int r) { return r * (r + 1) / 2; }

void check_length(const ConeDescriptor& cone, Eigen::Index len)
{
    if (len != cone.dim()) {
        throw DomainError("vector length " + std::to_string(len) + " does not match cone " +
                          cone.name() + " of dimension " + std::to_string(cone.dim()));
    }
}

} // namespace

ConeDescriptor::ConeDescriptor(ConeKind kind, int n, int r, std::vector<ConeDescriptor> factors)
    : kind_(kind), n_(n), r_(r), factors_(std::move(factors))
{
}

ConeDescriptor ConeDescriptor::half_line() { return ConeDescriptor(ConeKind::HalfLine, 1, 1); }

ConeDescriptor ConeDescriptor::lorentz(int n)
{
    if (n < 3) throw DomainError("Lorentz cone requires n >= 3");
    return ConeDescriptor(ConeKind::Lorentz, n, 2);
}

ConeDescriptor ConeDescriptor::spd(int r)
{
    if (r < 1) throw DomainError("SPD cone requires r >= 1");
    return ConeDescriptor(ConeKind::SPD, spd_dim(r), r);
}

ConeDescriptor ConeDescriptor::product(std::vector<ConeDescriptor> factors)
{
    if (factors.empty()) throw DomainError("product cone needs at least one factor");
    int n = 0, r = 0;
    for (const auto& f : factors) {
        n += f.dim();
        r += f.rank();
    }
    return ConeDescriptor(ConeKind::Product, n, r, std::move(factors));
}

ConeDescriptor ConeDescriptor::parse(std::string_view text)
{
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    };
    text = trim(text);
    auto number_after = [&](std::string_view prefix) -> int {
        std::string digits(text.substr(prefix.size()));
        if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) {
            throw DomainError("cannot parse cone '" + std::string(text) + "'");
        }
        return std::stoi(digits);
    };
    if (text == "halfline") return half_line();
    if (text.starts_with("lorentz")) return lorentz(number_after("lorentz"));
    if (text.starts_with("spd")) return spd(number_after("spd"));
    if (text.starts_with("product(") && text.ends_with(")")) {
        std::string_view body = text.substr(8, text.size() - 9);
        std::vector<ConeDescriptor> parts;
        int depth = 0;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= body.size(); ++i) {
            if (i == body.size() || (body[i] == ',' && depth == 0)) {
                parts.push_back(parse(body.substr(start, i - start)));
                start = i + 1;
            } else if (body[i] == '(') {
                ++depth;
            } else if (body[i] == ')') {
                --depth;
            }
        }
        return product(std::move(parts));
    }
    throw DomainError("unknown cone kind '" + std::string(text) + "'");
}

double ConeDescriptor::peirce_d() const
{
    if (r_ < 2) return 0.0;
    return 2.0 * (n_over_r() - 1.0) / (r_ - 1);
}

std::string ConeDescriptor::name() const
{
    switch (kind_) {
    case ConeKind::HalfLine: return "halfline";
    case ConeKind::Lorentz: return "lorentz" + std::to_string(n_);
    case ConeKind::SPD: return "spd" + std::to_string(r_);
    case ConeKind::Product: {
        std::string s = "product(";
        for (std::size_t i = 0; i < factors_.size(); ++i) {
            if (i) s += ",";
            s += factors_[i].name();
        }
        return s + ")";
    }
    }
    return "unknown";
}

bool ConeDescriptor::operator==(const ConeDescriptor& other) const
{
    return kind_ == other.kind_ && n_ == other.n_ && r_ == other.r_ && factors_ == other.factors_;
}

std::vector<RealVector> split(const ConeDescriptor& cone, const RealVector& v) { return split_impl(cone, v); }
std::vector<ComplexVector> split(const ConeDescriptor& cone, const ComplexVector& v) { return split_impl(cone, v); }

SmallMatrix spd_matrix(int r, const RealVector& c)
{
    SmallMatrix m(r, r);
    int k = r;
    for (int i = 0; i < r; ++i) {
        m(i, i) = c(i);
        for (int j = i + 1; j < r; ++j) {
            m(i, j) = m(j, i) = c(k++) / kSqrt2;
        }
    }
    return m;
}

SmallComplexMatrix spd_matrix(int r, const ComplexVector& c)
{
    SmallComplexMatrix m(r, r);
    int k = r;
    for (int i = 0; i < r; ++i) {
        m(i, i) = c(i);
        for (int j = i + 1; j < r; ++j) {
            m(i, j) = m(j, i) = c(k++) / kSqrt2;
        }
    }
    return m;
}

RealVector spd_coords(const SmallMatrix& m)
{
    const int r = static_cast<int>(m.rows());
    RealVector c(spd_dim(r));
    int k = r;
    for (int i = 0; i < r; ++i) {
        c(i) = m(i, i);
        for (int j = i + 1; j < r; ++j) c(k++) = kSqrt2 * 0.5 * (m(i, j) + m(j, i));
    }
    return c;
}

RealVector identity(const ConeDescriptor& cone)
{
    RealVector e = RealVector::Zero(cone.dim());
    switch (cone.kind()) {
    case ConeKind::HalfLine:
    case ConeKind::Lorentz: e(0) = 1.0; break;
    case ConeKind::SPD: e.head(cone.rank()).setOnes(); break;
    case ConeKind::Product: {
        int offset = 0;
        for (const auto& f : cone.factors()) {
            e.segment(offset, f.dim()) = identity(f);
            offset += f.dim();
        }
        break;
    }
    }
    return e;
}

double inner(const RealVector& a, const RealVector& b) { return a.dot(b); }

RealVector jordan_product(const ConeDescriptor& cone, const RealVector& a, const RealVector& b)
{
    check_length(cone, a.size());
    check_length(cone, b.size());
    switch (cone.kind()) {
    case ConeKind::HalfLine: return (RealVector(1) << a(0) * b(0)).finished();
    case ConeKind::Lorentz: {
        const int n = cone.dim();
        RealVector out(n);
        out(0) = a.dot(b);
        out.tail(n - 1) = a(0) * b.tail(n - 1) + b(0) * a.tail(n - 1);
        return out;
    }
    case ConeKind::SPD: {
        const int r = cone.rank();
        SmallMatrix A = spd_matrix(r, a), B = spd_matrix(r, b);
        return spd_coords(0.5 * (A * B + B * A));
    }
    case ConeKind::Product: {
        RealVector out(cone.dim());
        auto pa = split(cone, a), pb = split(cone, b);
        int offset = 0;
        for (std::size_t i = 0; i < pa.size(); ++i) {
            const auto& f = cone.factors()[i];
            out.segment(offset, f.dim()) = jordan_product(f, pa[i], pb[i]);
            offset += f.dim();
        }
        return out;
    }
    }
    return {};
}

double determinant(const ConeDescriptor& cone, const RealVector& v)
{
    check_length(cone, v.size());
    switch (cone.kind()) {
    case ConeKind::HalfLine: return v(0);
    case ConeKind::Lorentz: return v(0) * v(0) - v.tail(cone.dim() - 1).squaredNorm();
    case ConeKind::SPD: return spd_matrix(cone.rank(), v).determinant();
    case ConeKind::Product: {
        double d = 1.0;
        auto parts = split(cone, v);
        for (std::size_t i = 0; i < parts.size(); ++i) d *= determinant(cone.factors()[i], parts[i]);
        return d;
    }
    }
    return 0.0;
}

cdouble complex_determinant(const ConeDescriptor& cone, const ComplexVector& z)
{
    check_length(cone, z.size());
    switch (cone.kind()) {
    case ConeKind::HalfLine: return z(0);
    case ConeKind::Lorentz: {
        cdouble d = z(0) * z(0);
        for (int j = 1; j < cone.dim(); ++j) d -= z(j) * z(j);
        return d;
    }
    case ConeKind::SPD: return spd_matrix(cone.rank(), z).determinant();
    case ConeKind::Product: {
        cdouble d = 1.0;
        auto parts = split(cone, z);
        for (std::size_t i = 0; i < parts.size(); ++i) d *= complex_determinant(cone.factors()[i], parts[i]);
        return d;
    }
    }
    return 0.0;
}

double principal_minor(const ConeDescriptor& cone, const RealVector& v, int k)
{
    check_length(cone, v.size());
    if (k < 1 || k > cone.rank()) {
        throw DomainError("principal minor index " + std::to_string(k) + " outside 1.." +
                          std::to_string(cone.rank()));
    }
    switch (cone.kind()) {
    case ConeKind::HalfLine: return v(0);
    case ConeKind::Lorentz:
        // Projection onto R c_1 for c_1 = (1, 1, 0, ...)/2 has coefficient v_1 + v_2.
        return k == 1 ? v(0) + v(1) : determinant(cone, v);
    case ConeKind::SPD: return spd_matrix(cone.rank(), v).topLeftCorner(k, k).determinant();
    case ConeKind::Product: {
        auto parts = split(cone, v);
        double d = 1.0;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            const auto& f = cone.factors()[i];
            if (k <= f.rank()) return d * principal_minor(f, parts[i], k);
            d *= determinant(f, parts[i]);
            k -= f.rank();
        }
        return d;
    }
    }
    return 0.0;
}

bool contains(const ConeDescriptor& cone, const RealVector& v)
{
    if (v.size() != cone.dim()) return false;
    if (!v.allFinite()) return false;
    for (int k = 1; k <= cone.rank(); ++k) {
        if (!(principal_minor(cone, v, k) > 0.0)) return false;
    }
    return true;
}

double generalized_power(const ConeDescriptor& cone, const RealVector& v, const std::vector<double>& s)
{
    const int r = cone.rank();
    if (static_cast<int>(s.size()) != r) throw DomainError("generalized power needs rank-many exponents");
    double log_value = 0.0;
    for (int j = 1; j <= r; ++j) {
        const double minor = principal_minor(cone, v, j);
        if (!(minor > 0.0)) throw DomainError("generalized power outside the cone");
        const double next = j < r ? s[j] : 0.0;
        const double e = s[j - 1] - next;
        if (e != 0.0) log_value += e * std::log(minor);
    }
    return std::exp(log_value);
}

std::vector<RealVector> fixed_frame(const ConeDescriptor& cone)
{
    std::vector<RealVector> frame;
    const int n = cone.dim();
    switch (cone.kind()) {
    case ConeKind::HalfLine: frame.push_back(RealVector::Ones(1)); break;
    case ConeKind::Lorentz: {
        RealVector c1 = RealVector::Zero(n), c2 = RealVector::Zero(n);
        c1(0) = c1(1) = 0.5;
        c2(0) = 0.5;
        c2(1) = -0.5;
        frame = {c1, c2};
        break;
    }
    case ConeKind::SPD:
        for (int i = 0; i < cone.rank(); ++i) {
            RealVector c = RealVector::Zero(n);
            c(i) = 1.0;
            frame.push_back(c);
        }
        break;
    case ConeKind::Product: {
        int offset = 0;
        for (const auto& f : cone.factors()) {
            for (const auto& c : fixed_frame(f)) {
                RealVector full = RealVector::Zero(n);
                full.segment(offset, f.dim()) = c;
                frame.push_back(full);
            }
            offset += f.dim();
        }
        break;
    }
    }
    return frame;
}

SpectralDecomposition spectral_decompose(const ConeDescriptor& cone, const RealVector& v)
{
    check_length(cone, v.size());
    const int n = cone.dim();
    SpectralDecomposition out;
    switch (cone.kind()) {
    case ConeKind::HalfLine:
        out.eigenvalues = {v(0)};
        out.frame = {RealVector::Ones(1)};
        return out;
    case ConeKind::Lorentz: {
        const double radius = v.tail(n - 1).norm();
        RealVector omega = RealVector::Zero(n - 1);
        if (radius > 0.0) {
            omega = v.tail(n - 1) / radius;
        } else {
            omega(0) = 1.0;
        }
        RealVector c1(n), c2(n);
        c1(0) = c2(0) = 0.5;
        c1.tail(n - 1) = 0.5 * omega;
        c2.tail(n - 1) = -0.5 * omega;
        out.eigenvalues = {v(0) + radius, v(0) - radius};
        out.frame = {c1, c2};
        return out;
    }
    case ConeKind::SPD: {
        const int r = cone.rank();
        Eigen::SelfAdjointEigenSolver<SmallMatrix> es(spd_matrix(r, v));
        for (int i = r - 1; i >= 0; --i) {
            Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxMatrix, 1> q = es.eigenvectors().col(i);
            // Deterministic sign: first nonzero component positive.
            for (int j = 0; j < r; ++j) {
                if (std::abs(q(j)) > 1e-14) {
                    if (q(j) < 0) q = -q;
                    break;
                }
            }
            out.eigenvalues.push_back(es.eigenvalues()(i));
            out.frame.push_back(spd_coords(SmallMatrix(q * q.transpose())));
        }
        return out;
    }
    case ConeKind::Product: {
        auto parts = split(cone, v);
        std::vector<std::pair<double, RealVector>> items;
        int offset = 0;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            const auto& f = cone.factors()[i];
            auto sd = spectral_decompose(f, parts[i]);
            for (std::size_t k = 0; k < sd.eigenvalues.size(); ++k) {
                RealVector full = RealVector::Zero(n);
                full.segment(offset, f.dim()) = sd.frame[k];
                items.emplace_back(sd.eigenvalues[k], full);
            }
            offset += f.dim();
        }
        std::stable_sort(items.begin(), items.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        for (auto& [lam, c] : items) {
            out.eigenvalues.push_back(lam);
            out.frame.push_back(std::move(c));
        }
        return out;
    }
    }
    return out;
}

namespace {

template <typename F>
RealVector spectral_apply(const ConeDescriptor& cone, const RealVector& v, F&& fn)
{
    auto sd = spectral_decompose(cone, v);
    RealVector out = RealVector::Zero(cone.dim());
    for (std::size_t i = 0; i < sd.eigenvalues.size(); ++i) out += fn(sd.eigenvalues[i]) * sd.frame[i];
    return out;
}

} // namespace

RealVector jordan_power(const ConeDescriptor& cone, const RealVector& v, double p)
{
    return spectral_apply(cone, v, [&](double lam) {
        if (lam <= 0.0 && p != std::floor(p)) throw DomainError("non-integer power outside the cone");
        return std::pow(lam, p);
    });
}

RealVector jordan_exp(const ConeDescriptor& cone, const RealVector& v)
{
    return spectral_apply(cone, v, [](double lam) { return std::exp(lam); });
}

Eigen::MatrixXd multiplication_operator(const ConeDescriptor& cone, const RealVector& a)
{
    const int n = cone.dim();
    Eigen::MatrixXd L(n, n);
    for (int j = 0; j < n; ++j) {
        RealVector ej = RealVector::Unit(n, j);
        L.col(j) = jordan_product(cone, a, ej);
    }
    return L;
}

Eigen::MatrixXd quadratic_representation(const ConeDescriptor& cone, const RealVector& a)
{
    Eigen::MatrixXd L = multiplication_operator(cone, a);
    Eigen::MatrixXd L2 = multiplication_operator(cone, jordan_product(cone, a, a));
    return 2.0 * L * L - L2;
}

RealVector spectral_norm_scale(const ConeDescriptor& cone)
{
    switch (cone.kind()) {
    case ConeKind::HalfLine:
    case ConeKind::SPD: return RealVector::Ones(cone.dim());
    case ConeKind::Lorentz: return RealVector::Constant(cone.dim(), kSqrt2);
    case ConeKind::Product: {
        RealVector s(cone.dim());
        int offset = 0;
        for (const auto& f : cone.factors()) {
            s.segment(offset, f.dim()) = spectral_norm_scale(f);
            offset += f.dim();
        }
        return s;
    }
    }
    return {};
}

namespace {

Polynomial multiply(const Polynomial& a, const Polynomial& b)
{
    Polynomial out;
    for (const auto& [ia, ca] : a) {
        for (const auto& [ib, cb] : b) {
            std::vector<int> idx(ia.size());
            for (std::size_t k = 0; k < ia.size(); ++k) idx[k] = ia[k] + ib[k];
            out[idx] += ca * cb;
        }
    }
    std::erase_if(out, [](const auto& kv) { return kv.second == 0.0; });
    return out;
}

Polynomial embed(const Polynomial& p, int offset, int n)
{
    Polynomial out;
    for (const auto& [idx, c] : p) {
        std::vector<int> full(n, 0);
        std::copy(idx.begin(), idx.end(), full.begin() + offset);
        out[full] = c;
    }
    return out;
}

} // namespace

Polynomial determinant_polynomial(const ConeDescriptor& cone)
{
    const int n = cone.dim();
    Polynomial p;
    switch (cone.kind()) {
    case ConeKind::HalfLine: p[{1}] = 1.0; break;
    case ConeKind::Lorentz:
        for (int j = 0; j < n; ++j) {
            std::vector<int> idx(n, 0);
            idx[j] = 2;
            p[idx] = j == 0 ? 1.0 : -1.0;
        }
        break;
    case ConeKind::SPD: {
        // Leibniz expansion; entry (i,j) is a coordinate index and a scale.
        const int r = cone.rank();
        std::vector<std::vector<int>> coord(r, std::vector<int>(r));
        std::vector<std::vector<double>> scale(r, std::vector<double>(r, 1.0));
        int k = r;
        for (int i = 0; i < r; ++i) {
            coord[i][i] = i;
            for (int j = i + 1; j < r; ++j) {
                coord[i][j] = coord[j][i] = k++;
                scale[i][j] = scale[j][i] = 1.0 / kSqrt2;
            }
        }
        std::vector<int> perm(r);
        std::iota(perm.begin(), perm.end(), 0);
        do {
            int inversions = 0;
            for (int a = 0; a < r; ++a)
                for (int b = a + 1; b < r; ++b)
                    if (perm[a] > perm[b]) ++inversions;
            std::vector<int> idx(n, 0);
            double c = inversions % 2 ? -1.0 : 1.0;
            for (int i = 0; i < r; ++i) {
                idx[coord[i][perm[i]]] += 1;
                c *= scale[i][perm[i]];
            }
            p[idx] += c;
        } while (std::next_permutation(perm.begin(), perm.end()));
        std::erase_if(p, [](const auto& kv) { return std::abs(kv.second) < 1e-15; });
        break;
    }
    case ConeKind::Product: {
        std::vector<int> zero(n, 0);
        p[zero] = 1.0;
        int offset = 0;
        for (const auto& f : cone.factors()) {
            p = multiply(p, embed(determinant_polynomial(f), offset, n));
            offset += f.dim();
        }
        break;
    }
    }
    return p;
}

double evaluate(const Polynomial& poly, const RealVector& v)
{
    double total = 0.0;
    for (const auto& [idx, c] : poly) {
        double term = c;
        for (std::size_t k = 0; k < idx.size(); ++k)
            for (int e = 0; e < idx[k]; ++e) term *= v(static_cast<Eigen::Index>(k));
        total += term;
    }
    return total;
}

} // namespace bergman
