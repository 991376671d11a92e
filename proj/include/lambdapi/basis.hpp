/**
 * @file basis.hpp
 * @brief Feature basis Phi (n x s, full column rank), the built-in
 *        generators and the basis text format.
 *
 * Text format:
 *
 *     basis n=<n> s=<s>
 *     <s floats>          one line per state
 *
 * Generator specs: `identity`, `poly:<degree>`, `indicator:<k>`,
 * `random:<seed>[:<s>]`.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "lambdapi/error.hpp"
#include "lambdapi/linalg.hpp"
#include "lambdapi/rng.hpp"
#include "lambdapi/text.hpp"

namespace lambdapi {

class FeatureBasis {
public:
    explicit FeatureBasis(Matrix phi) : phi_(std::move(phi)) {
        if (phi_.rows() == 0 || phi_.cols() == 0) throw DimensionError("empty feature matrix");
        if (phi_.cols() > phi_.rows())
            throw DimensionError("basis has s=" + std::to_string(phi_.cols()) + " > n=" +
                                 std::to_string(phi_.rows()));
        if (!phi_.allFinite()) throw DomainError("feature matrix has non-finite entries");
        const Eigen::BDCSVD<Matrix> svd(phi_);
        const auto& sv = svd.singularValues();
        if (!(sv[sv.size() - 1] > 1e-10 * sv[0]))
            throw DomainError("feature matrix is rank deficient (singular values " +
                              std::to_string(sv[0]) + " .. " + std::to_string(sv[sv.size() - 1]) +
                              ")");
    }

    std::size_t num_states() const noexcept { return static_cast<std::size_t>(phi_.rows()); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(phi_.cols()); }
    const Matrix& matrix() const noexcept { return phi_; }

    /// phi(i) as a column vector.
    Vector row(std::size_t i) const { return phi_.row(static_cast<Eigen::Index>(i)).transpose(); }

    /// Phi r
    Vector values(const WeightVector& r) const {
        if (static_cast<std::size_t>(r.size()) != dim())
            throw DimensionError("weight vector has length " + std::to_string(r.size()) +
                                 ", basis has s=" + std::to_string(dim()));
        return phi_ * r;
    }

private:
    Matrix phi_;
};

inline FeatureBasis identity_basis(std::size_t n) {
    const auto m = static_cast<Eigen::Index>(n);
    return FeatureBasis(Matrix::Identity(m, m));
}

/// Columns x^0 .. x^degree with x = (i-1)/(n-1) in [0,1].
inline FeatureBasis polynomial_basis(std::size_t n, std::size_t degree) {
    if (degree + 1 > n)
        throw DomainError("polynomial degree " + std::to_string(degree) + " needs n > degree");
    Matrix phi(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(degree + 1));
    for (std::size_t i = 0; i < n; ++i) {
        const double x = n > 1 ? double(i) / double(n - 1) : 0.0;
        double v = 1.0;
        for (std::size_t d = 0; d <= degree; ++d, v *= x)
            phi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = v;
    }
    return FeatureBasis(std::move(phi));
}

/// k contiguous aggregation blocks; state i lies in block floor(i k / n).
inline FeatureBasis indicator_basis(std::size_t n, std::size_t k) {
    if (k < 1 || k > n) throw DomainError("indicator basis needs 1 <= k <= n");
    Matrix phi = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < n; ++i)
        phi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i * k / n)) = 1.0;
    return FeatureBasis(std::move(phi));
}

/// Seeded uniform entries, orthonormalized (thin Householder Q).
inline FeatureBasis random_basis(std::size_t n, std::size_t s, std::uint64_t seed) {
    if (s < 1 || s > n) throw DomainError("random basis needs 1 <= s <= n");
    auto eng = RngStream{seed, 0x62617369ULL}.engine();
    Matrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(s));
    for (Eigen::Index c = 0; c < a.cols(); ++c)
        for (Eigen::Index r = 0; r < a.rows(); ++r) a(r, c) = uniform01(eng);
    const Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
    return FeatureBasis(std::move(q));
}

inline constexpr std::size_t kDefaultRandomBasisDim = 4;

/// Builds a basis from a generator spec (see file comment).
inline FeatureBasis make_basis(const std::string& spec, std::size_t n) {
    const auto parts = text::split(spec, ':');
    const auto& kind = parts[0];
    const auto arg = [&](std::size_t k) -> std::int64_t {
        if (parts.size() <= k) throw ParseError("basis spec '" + spec + "' is missing a value", 0);
        const auto v = text::to_int(parts[k]);
        if (!v || *v < 0) throw ParseError("bad integer in basis spec '" + spec + "'", 0);
        return *v;
    };
    if (kind == "identity" && parts.size() == 1) return identity_basis(n);
    if (kind == "poly" && parts.size() == 2)
        return polynomial_basis(n, static_cast<std::size_t>(arg(1)));
    if (kind == "indicator" && parts.size() == 2)
        return indicator_basis(n, static_cast<std::size_t>(arg(1)));
    if (kind == "random" && (parts.size() == 2 || parts.size() == 3)) {
        const std::size_t s = parts.size() == 3 ? static_cast<std::size_t>(arg(2))
                                                : std::min(n, kDefaultRandomBasisDim);
        return random_basis(n, s, static_cast<std::uint64_t>(arg(1)));
    }
    throw ParseError("unknown basis spec '" + spec + "'", 0);
}

inline FeatureBasis parse_basis(std::istream& in) {
    std::string raw;
    std::size_t lineno = 0, n = 0, s = 0, row = 0;
    Matrix phi;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto line = text::strip_comment(raw);
        if (line.empty()) continue;
        const auto tok = text::split_ws(line);
        if (n == 0) {
            if (tok.size() != 3 || tok[0] != "basis")
                throw ParseError("expected header 'basis n=<n> s=<s>'", lineno);
            const auto nn = text::parse_int(text::field(tok[1], "n", lineno), lineno, "n");
            const auto ss = text::parse_int(text::field(tok[2], "s", lineno), lineno, "s");
            if (nn < 1 || ss < 1) throw ParseError("n and s must be positive", lineno);
            n = static_cast<std::size_t>(nn);
            s = static_cast<std::size_t>(ss);
            phi.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(s));
            continue;
        }
        if (row >= n) throw ParseError("more than n feature rows", lineno);
        if (tok.size() != s)
            throw ParseError("expected " + std::to_string(s) + " values, got " +
                                 std::to_string(tok.size()),
                             lineno);
        for (std::size_t c = 0; c < s; ++c)
            phi(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(c)) =
                text::parse_double(tok[c], lineno, "feature");
        ++row;
    }
    if (n == 0) throw ParseError("missing 'basis' header", 0);
    if (row != n)
        throw ParseError("expected " + std::to_string(n) + " feature rows, got " +
                             std::to_string(row),
                         0);
    try {
        return FeatureBasis(std::move(phi));
    } catch (const Error& e) {
        throw ParseError(e.what(), 0);
    }
}

inline FeatureBasis load_basis(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open basis file '" + path + "'", 0);
    return parse_basis(in);
}

inline void write_basis(std::ostream& out, const FeatureBasis& basis) {
    const Matrix& phi = basis.matrix();
    out << "basis n=" << phi.rows() << " s=" << phi.cols() << '\n';
    for (Eigen::Index i = 0; i < phi.rows(); ++i) {
        for (Eigen::Index c = 0; c < phi.cols(); ++c)
            out << (c ? " " : "") << text::format_double(phi(i, c));
        out << '\n';
    }
}

}  // namespace lambdapi
