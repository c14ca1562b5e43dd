#pragma once

// Dense complex linear algebra at qudit scale: vectors, square operators,
// tensor products, partial traces and Hermitian spectra. Design envelope is
// bipartite dimension 256 (d = 16); everything is plain dense storage.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <utility>
#include <vector>

#include "steersim/errors.hpp"

namespace steersim::la {

using Cx = std::complex<double>;
using CVec = std::vector<Cx>;

// Validation tolerances for density operators (absolute).
inline constexpr double kHermTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kMinEigTol = -1e-9;
// kron refuses to build anything larger than this.
inline constexpr int kMaxDim = 16384;

inline double norm(const CVec& v) {
    double s = 0.0;
    for (const auto& c : v) s += std::norm(c);
    return std::sqrt(s);
}

inline CVec normalized(CVec v) {
    const double n = norm(v);
    if (n <= 0.0) throw invalid_state("cannot normalize a zero vector");
    for (auto& c : v) c /= n;
    return v;
}

// <u|v> with the physics convention: conjugate-linear in the first slot.
inline Cx inner(const CVec& u, const CVec& v) {
    if (u.size() != v.size()) throw dimension_mismatch("inner: length mismatch");
    Cx s{0.0, 0.0};
    for (std::size_t i = 0; i < u.size(); ++i) s += std::conj(u[i]) * v[i];
    return s;
}

inline CVec conjugated(CVec v) {
    for (auto& c : v) c = std::conj(c);
    return v;
}

// |u>|v> in Alice-major index order: out[i*dB + j] = u[i]*v[j].
inline CVec kron_vec(const CVec& u, const CVec& v) {
    CVec out(u.size() * v.size());
    std::size_t k = 0;
    for (const auto& a : u)
        for (const auto& b : v) out[k++] = a * b;
    return out;
}

// Square dense complex matrix, row-major.
class Mat {
  public:
    Mat() = default;
    explicit Mat(int n) : n_(n), e_(static_cast<std::size_t>(n) * n, Cx{0.0, 0.0}) {}

    static Mat identity(int n) {
        Mat m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    // |u><v|
    static Mat outer(const CVec& u, const CVec& v) {
        if (u.size() != v.size()) throw dimension_mismatch("outer: length mismatch");
        Mat m(static_cast<int>(u.size()));
        for (std::size_t r = 0; r < u.size(); ++r)
            for (std::size_t c = 0; c < v.size(); ++c) m.e_[r * u.size() + c] = u[r] * std::conj(v[c]);
        return m;
    }

    int dim() const { return n_; }

    Cx& operator()(int r, int c) { return e_[static_cast<std::size_t>(r) * n_ + c]; }
    const Cx& operator()(int r, int c) const { return e_[static_cast<std::size_t>(r) * n_ + c]; }

    Mat& operator+=(const Mat& o) {
        check_same(o);
        for (std::size_t i = 0; i < e_.size(); ++i) e_[i] += o.e_[i];
        return *this;
    }
    Mat& operator-=(const Mat& o) {
        check_same(o);
        for (std::size_t i = 0; i < e_.size(); ++i) e_[i] -= o.e_[i];
        return *this;
    }
    Mat& operator*=(Cx s) {
        for (auto& x : e_) x *= s;
        return *this;
    }
    friend Mat operator+(Mat a, const Mat& b) { return a += b; }
    friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
    friend Mat operator*(Cx s, Mat a) { return a *= s; }

    friend Mat operator*(const Mat& a, const Mat& b) {
        a.check_same(b);
        const int n = a.n_;
        Mat out(n);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                const Cx aik = a(i, k);
                if (aik == Cx{0.0, 0.0}) continue;
                for (int j = 0; j < n; ++j) out(i, j) += aik * b(k, j);
            }
        return out;
    }

    CVec apply(const CVec& x) const {
        if (static_cast<int>(x.size()) != n_) throw dimension_mismatch("apply: length mismatch");
        CVec y(n_, Cx{0.0, 0.0});
        for (int i = 0; i < n_; ++i) {
            Cx s{0.0, 0.0};
            for (int j = 0; j < n_; ++j) s += (*this)(i, j) * x[j];
            y[i] = s;
        }
        return y;
    }

    Mat adjoint() const {
        Mat m(n_);
        for (int r = 0; r < n_; ++r)
            for (int c = 0; c < n_; ++c) m(c, r) = std::conj((*this)(r, c));
        return m;
    }
    Mat transpose() const {
        Mat m(n_);
        for (int r = 0; r < n_; ++r)
            for (int c = 0; c < n_; ++c) m(c, r) = (*this)(r, c);
        return m;
    }
    Mat conjugate() const {
        Mat m(n_);
        for (int r = 0; r < n_; ++r)
            for (int c = 0; c < n_; ++c) m(r, c) = std::conj((*this)(r, c));
        return m;
    }

    Cx trace() const {
        Cx s{0.0, 0.0};
        for (int i = 0; i < n_; ++i) s += (*this)(i, i);
        return s;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& x : e_) m = std::max(m, std::abs(x));
        return m;
    }

    // max_ij |a_ij - conj(a_ji)|
    double hermiticity_deviation() const {
        double dev = 0.0;
        for (int r = 0; r < n_; ++r)
            for (int c = r; c < n_; ++c) dev = std::max(dev, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
        return dev;
    }

    bool all_finite() const {
        for (const auto& x : e_)
            if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
        return true;
    }

  private:
    void check_same(const Mat& o) const {
        if (n_ != o.n_) throw dimension_mismatch("matrix dimension mismatch");
    }
    int n_ = 0;
    CVec e_;
};

inline Mat kron(const Mat& a, const Mat& b) {
    const long long n = static_cast<long long>(a.dim()) * b.dim();
    if (n > kMaxDim) throw size_overflow("kron: result dimension exceeds limit");
    Mat out(static_cast<int>(n));
    const int da = a.dim(), db = b.dim();
    for (int i = 0; i < da; ++i)
        for (int k = 0; k < da; ++k) {
            const Cx aik = a(i, k);
            for (int j = 0; j < db; ++j)
                for (int l = 0; l < db; ++l) out(i * db + j, k * db + l) = aik * b(j, l);
        }
    return out;
}

enum class Side { A, B };

// Bipartite index convention throughout: row = alice*dB + bob.
inline Mat partial_trace(const Mat& rho, int da, int db, Side traced) {
    if (da < 1 || db < 1 || rho.dim() != da * db) throw bad_split("partial_trace: dimensions do not factor as declared");
    if (traced == Side::A) {
        Mat out(db);
        for (int j = 0; j < db; ++j)
            for (int jp = 0; jp < db; ++jp) {
                Cx s{0.0, 0.0};
                for (int i = 0; i < da; ++i) s += rho(i * db + j, i * db + jp);
                out(j, jp) = s;
            }
        return out;
    }
    Mat out(da);
    for (int i = 0; i < da; ++i)
        for (int ip = 0; ip < da; ++ip) {
            Cx s{0.0, 0.0};
            for (int j = 0; j < db; ++j) s += rho(i * db + j, ip * db + j);
            out(i, ip) = s;
        }
    return out;
}

// Re <v|rho|v>; the imaginary residue of a Hermitian quadratic form is noise.
inline double quad_form(const Mat& rho, const CVec& v) {
    if (static_cast<int>(v.size()) != rho.dim()) throw dimension_mismatch("quad_form: length mismatch");
    Cx s{0.0, 0.0};
    for (int i = 0; i < rho.dim(); ++i) {
        Cx row{0.0, 0.0};
        for (int j = 0; j < rho.dim(); ++j) row += rho(i, j) * v[j];
        s += std::conj(v[i]) * row;
    }
    return s.real();
}

// Eigenvalues (ascending) and unitary of eigenvectors (columns, same order)
// of a Hermitian matrix, via cyclic Jacobi with complex rotations. Input is
// symmetrized first; callers are expected to pass (near-)Hermitian matrices.
inline std::pair<std::vector<double>, Mat> hermitian_eigensystem(Mat a) {
    const int n = a.dim();
    Mat v = Mat::identity(n);
    if (n == 0) return {{}, v};

    for (int r = 0; r < n; ++r)
        for (int c = r; c < n; ++c) {
            const Cx m = 0.5 * (a(r, c) + std::conj(a(c, r)));
            a(r, c) = m;
            a(c, r) = std::conj(m);
        }

    double scale = 0.0;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) scale += std::norm(a(r, c));
    scale = std::sqrt(scale);
    const double stop = 1e-14 * std::max(1.0, scale);

    auto off_norm = [&] {
        double s = 0.0;
        for (int r = 0; r < n; ++r)
            for (int c = r + 1; c < n; ++c) s += std::norm(a(r, c));
        return std::sqrt(2.0 * s);
    };

    for (int sweep = 0; sweep < 100; ++sweep) {
        const double off = off_norm();
        if (off <= stop) break;
        const double thresh = (sweep < 3) ? 0.2 * off / (n * n) : 0.0;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const Cx apq = a(p, q);
                const double h = std::abs(apq);
                if (h <= thresh || h == 0.0) continue;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double tau = (app - aqq) / (2.0 * h);
                const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                              : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const Cx ph = apq / h;  // e^{i arg(a_pq)}
                const Cx jpq = -s * ph;
                const Cx jqp = s * std::conj(ph);
                // A <- A*J (columns), then A <- J^dagger*A (rows); V <- V*J.
                for (int r = 0; r < n; ++r) {
                    const Cx arp = a(r, p), arq = a(r, q);
                    a(r, p) = c * arp + jqp * arq;
                    a(r, q) = jpq * arp + c * arq;
                    const Cx vrp = v(r, p), vrq = v(r, q);
                    v(r, p) = c * vrp + jqp * vrq;
                    v(r, q) = jpq * vrp + c * vrq;
                }
                for (int r = 0; r < n; ++r) {
                    const Cx apr = a(p, r), aqr = a(q, r);
                    a(p, r) = c * apr + std::conj(jqp) * aqr;
                    a(q, r) = std::conj(jpq) * apr + c * aqr;
                }
                a(p, q) = Cx{0.0, 0.0};
                a(q, p) = Cx{0.0, 0.0};
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> diag(n);
    for (int i = 0; i < n; ++i) diag[i] = a(i, i).real();
    std::sort(order.begin(), order.end(), [&](int x, int y) { return diag[x] < diag[y]; });

    std::vector<double> evals(n);
    Mat vs(n);
    for (int k = 0; k < n; ++k) {
        evals[k] = diag[order[k]];
        for (int r = 0; r < n; ++r) vs(r, k) = v(r, order[k]);
    }
    return {std::move(evals), std::move(vs)};
}

inline std::vector<double> hermitian_eigenvalues(const Mat& a) { return hermitian_eigensystem(a).first; }

// A density operator: Hermitian, unit trace, positive semidefinite within
// fixed tolerances, all checked at construction. Invalid matrices are
// rejected, never repaired; clipped() is the one explicit repair path.
class DensityOperator {
  public:
    explicit DensityOperator(Mat m) : m_(std::move(m)) {
        if (m_.dim() < 1) throw invalid_state("density operator: empty matrix");
        if (!m_.all_finite()) throw invalid_state("density operator: non-finite entries");
        if (m_.hermiticity_deviation() > kHermTol) throw non_hermitian("density operator: not Hermitian within 1e-10");
        if (std::abs(m_.trace() - Cx{1.0, 0.0}) > kTraceTol) throw invalid_state("density operator: trace differs from 1");
        min_eig_ = hermitian_eigenvalues(m_).front();
        if (min_eig_ < kMinEigTol) throw invalid_state("density operator: negative eigenvalue beyond tolerance");
    }

    // Explicit repair: clip negative eigenvalues to zero and renormalize.
    static DensityOperator clipped(const Mat& m) {
        auto [evals, vecs] = hermitian_eigensystem(m);
        const int n = m.dim();
        double tot = 0.0;
        for (double& e : evals) {
            e = std::max(e, 0.0);
            tot += e;
        }
        if (tot <= 0.0) throw invalid_state("clipped: matrix has no positive part");
        Mat out(n);
        for (int k = 0; k < n; ++k) {
            if (evals[k] == 0.0) continue;
            const double w = evals[k] / tot;
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) out(r, c) += w * vecs(r, k) * std::conj(vecs(c, k));
        }
        return DensityOperator(std::move(out));
    }

    const Mat& mat() const { return m_; }
    int dim() const { return m_.dim(); }
    double min_eigenvalue() const { return min_eig_; }

    double purity() const {
        double s = 0.0;
        for (int r = 0; r < dim(); ++r)
            for (int c = 0; c < dim(); ++c) s += std::norm(m_(r, c));
        return s;  // Tr rho^2 for Hermitian rho
    }

  private:
    Mat m_;
    double min_eig_ = 0.0;
};

inline DensityOperator partial_trace(const DensityOperator& rho, int da, int db, Side traced) {
    return DensityOperator(partial_trace(rho.mat(), da, db, traced));
}

inline double expect(const DensityOperator& rho, const Mat& op) {
    if (op.dim() != rho.dim()) throw dimension_mismatch("expect: dimension mismatch");
    const double tol = 1e-9 * std::max(1.0, op.max_abs());
    if (op.hermiticity_deviation() > tol) throw non_hermitian("expect: observable is not Hermitian");
    Cx s{0.0, 0.0};
    for (int i = 0; i < rho.dim(); ++i)
        for (int j = 0; j < rho.dim(); ++j) s += rho.mat()(i, j) * op(j, i);
    if (std::abs(s.imag()) > 1e-10 * std::max(1.0, std::abs(s.real())))
        throw invalid_state("expect: imaginary residue above tolerance");
    return s.real();
}

}  // namespace steersim::la
