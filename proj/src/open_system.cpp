#include "gatecraft/open_system.hpp"

#include "gatecraft/errors.hpp"

#include <cmath>
#include <sstream>

namespace gatecraft {

std::string to_string(RateConvention r) {
    return r == RateConvention::standard_t1 ? "standard_t1" : "literal_eq16";
}

RateConvention rate_convention_from_string(const std::string& s) {
    if (s == "standard_t1") return RateConvention::standard_t1;
    if (s == "literal_eq16") return RateConvention::literal_eq16;
    throw InvalidParameter("rate_convention: unknown value '" + s + "'");
}

void validate(const LindbladConfig& cfg, const TruncationConfig& trunc, const std::string& path) {
    auto check_t1 = [&](double t1, const char* name) {
        if (!(t1 > 0.0))
            throw InvalidParameter(path + "." + name + ": must be positive or infinite");
    };
    check_t1(cfg.t1_fixed, "t1_fixed");
    check_t1(cfg.t1_tunable, "t1_tunable");
    if (cfg.level_truncation < 1 || cfg.level_truncation > trunc.levels_per_qubit - 1) {
        std::ostringstream os;
        os << path << ".level_truncation: must lie in [1, " << trunc.levels_per_qubit - 1 << "]";
        throw InvalidParameter(os.str());
    }
}

std::vector<CollapseOperator> collapse_operators(const CoupledSystem& sys, const LindbladConfig& cfg) {
    validate(cfg, sys.truncation());
    const int d = sys.levels();
    const double scale = cfg.rate_convention == RateConvention::literal_eq16 ? 2.0 : 1.0;
    std::vector<CollapseOperator> ops;
    for (int q = 0; q < 2; ++q) {
        const double t1 = q == 0 ? cfg.t1_fixed : cfg.t1_tunable;
        if (std::isinf(t1)) continue;
        for (int j = 0; j < cfg.level_truncation; ++j) {
            CollapseOperator op;
            op.qubit = q;
            op.level = j;
            op.rate = scale / (t1 * 1000.0);
            const double w = std::sqrt(j + 1.0);
            for (int i = 0; i < d; ++i) {
                const BareLabel to = q == 0 ? BareLabel{j, i} : BareLabel{i, j};
                const BareLabel from = q == 0 ? BareLabel{j + 1, i} : BareLabel{i, j + 1};
                op.terms.push_back({sys.index_of(to), sys.index_of(from), w});
            }
            ops.push_back(std::move(op));
        }
    }
    return ops;
}

namespace {

// Master equation in the interaction frame of the static dressed Hamiltonian,
// applied to a horizontal stack of d x d blocks.
class LindbladRhs {
public:
    LindbladRhs(const CoupledSystem& sys, const DriveSchedule& s, std::vector<CollapseOperator> ops)
        : sys_(sys), s_(s), ops_(std::move(ops)), n_(sys.dim()), phase_(n_), decay_(RealVector::Zero(n_)) {
        for (const auto& op : ops_)
            for (const auto& t : op.terms) decay_(t.from) += op.rate * t.weight * t.weight;
    }

    // Blocks are Hermitian, so rho V = (V rho)^dag.
    void operator()(double t, const ComplexMatrix& y, ComplexMatrix& dy) {
        const auto& e = sys_.dressed_energies();
        for (int a = 0; a < n_; ++a) phase_(a) = std::polar(1.0, kTwoPi * e(a) * t);
        dy.resize(y.rows(), y.cols());
        const double c = ej_offset(s_, t);
        const Eigen::Index blocks = y.cols() / n_;
        if (c != 0.0) {
            vi_ = (cplx(0.0, -kTwoPi * c) * phase_).asDiagonal() * sys_.v_dressed().cast<cplx>() *
                  phase_.conjugate().asDiagonal();
            dy.noalias() = vi_ * y;
            for (Eigen::Index k = 0; k < blocks; ++k) {
                auto blk = dy.middleCols(k * n_, n_);
                blk += blk.adjoint().eval();
            }
        } else {
            dy.setZero();
        }
        if (ops_.empty()) return;
        for (Eigen::Index k = 0; k < blocks; ++k) {
            auto rho = y.middleCols(k * n_, n_);
            auto out = dy.middleCols(k * n_, n_);
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j) out(i, j) -= 0.5 * (decay_(i) + decay_(j)) * rho(i, j);
            for (const auto& op : ops_) {
                for (const auto& p : op.terms) {
                    const cplx fp = op.rate * p.weight * phase_(p.to) * std::conj(phase_(p.from));
                    for (const auto& q : op.terms) {
                        const cplx fq = q.weight * std::conj(phase_(q.to)) * phase_(q.from);
                        out(p.to, q.to) += fp * fq * rho(p.from, q.from);
                    }
                }
            }
        }
    }

private:
    const CoupledSystem& sys_;
    const DriveSchedule& s_;
    std::vector<CollapseOperator> ops_;
    int n_;
    ComplexVector phase_;
    RealVector decay_;
    ComplexMatrix vi_;
};

// Propagates each d x d block of y from 0 to t_gate; returns dressed-frame blocks.
ComplexMatrix evolve_blocks(const CoupledSystem& sys, const DriveSchedule& s,
                            const LindbladConfig& cfg, ComplexMatrix y, const PropagationOptions& opt) {
    validate(s);
    InteractionFrameRhs unitary(sys, [&s](double t) { return ej_offset(s, t); });
    const OdeOptions o = ode_options_for(unitary, opt);
    LindbladRhs rhs(sys, s, collapse_operators(sys, cfg));
    auto f = [&rhs](double t, const ComplexMatrix& yy, ComplexMatrix& dy) { rhs(t, yy, dy); };
    const double tg = s.envelope.t_gate;
    integrate_dop853(f, 0.0, tg, y, o);
    const int n = sys.dim();
    ComplexVector p(n);
    for (int a = 0; a < n; ++a) p(a) = std::polar(1.0, -kTwoPi * sys.dressed_energies()(a) * tg);
    for (Eigen::Index k = 0; k < y.cols() / n; ++k) {
        auto b = y.middleCols(k * n, n);
        b = p.asDiagonal() * b * p.conjugate().asDiagonal();
    }
    return y;
}

Matrix4c pauli(int m) {
    Eigen::Matrix2cd s[4];
    const cplx i(0.0, 1.0);
    s[0] << 1, 0, 0, 1;
    s[1] << 0, 1, 1, 0;
    s[2] << 0, -i, i, 0;
    s[3] << 1, 0, 0, -1;
    const auto& a = s[m / 4];
    const auto& b = s[m % 4];
    Matrix4c p;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) p(r, c) = a(r / 2, c / 2) * b(r % 2, c % 2);
    return p;
}

Eigen::Matrix<cplx, 16, 1> pauli_coefficients(const Matrix4c& u) {
    Eigen::Matrix<cplx, 16, 1> c;
    for (int m = 0; m < 16; ++m) c(m) = (pauli(m).adjoint() * u).trace() / 4.0;
    return c;
}

}  // namespace

ComplexMatrix propagate_lindblad(const CoupledSystem& sys, const DriveSchedule& s,
                                 const LindbladConfig& cfg, const ComplexMatrix& rho0,
                                 const PropagationOptions& opt) {
    const int n = sys.dim();
    if (rho0.rows() != n || rho0.cols() != n)
        throw InvalidParameter("rho0: dimension does not match the coupled system");
    if ((rho0 - rho0.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
        throw InvalidParameter("rho0: not Hermitian");
    if (std::abs(rho0.trace() - 1.0) > 1e-10) throw InvalidParameter("rho0: trace is not 1");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho0, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) throw InvalidParameter("rho0: not positive semidefinite");
    return evolve_blocks(sys, s, cfg, rho0, opt);
}

ProcessMap process_map_from_superoperator(const Matrix16c& superop) {
    ProcessMap m;
    m.superoperator = superop;
    Matrix16c choi;
    for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l)
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) choi(4 * k + i, 4 * l + j) = superop(i + 4 * j, k + 4 * l);
    Matrix16c w;
    for (int p = 0; p < 16; ++p) {
        const Matrix4c pm = pauli(p);
        for (int k = 0; k < 4; ++k)
            for (int i = 0; i < 4; ++i) w(4 * k + i, p) = pm(i, k);
    }
    m.chi = w.adjoint() * choi * w / 16.0;
    m.trace_chi = m.chi.trace().real();
    return m;
}

ProcessMap unitary_process_map(const Matrix4c& u) {
    Matrix16c sop;
    for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
            const Matrix4c img = u.col(k) * u.col(l).adjoint();
            for (int j = 0; j < 4; ++j)
                for (int i = 0; i < 4; ++i) sop(i + 4 * j, k + 4 * l) = img(i, j);
        }
    return process_map_from_superoperator(sop);
}

double process_fidelity_of(const ProcessMap& m, const GateTarget& target) {
    const auto c = pauli_coefficients(target.ideal());
    return (c.adjoint() * m.chi * c)(0, 0).real();
}

double average_fidelity_of(const ProcessMap& m, const GateTarget& target) {
    return (4.0 * process_fidelity_of(m, target) + m.trace_chi) / 5.0;
}

namespace {

ProcessFidelity process_fidelity_in_frame(const CoupledSystem& sys, const DriveSchedule& s,
                                          const LindbladConfig& cfg, const GateTarget& target,
                                          const VirtualZResult& vz, const PropagationOptions& opt) {
    const int n = sys.dim();
    const auto idx = sys.computational_indices();
    const Matrix4c pre = z_phase_gate(vz.angles[0], vz.angles[1]);
    const Matrix4c post = z_phase_gate(vz.angles[2], vz.angles[3]);

    // Hermitian inputs: E_kk, E_kl + E_lk and i(E_kl - E_lk) for k < l.
    ComplexMatrix y = ComplexMatrix::Zero(n, 16 * n);
    const cplx i1(0.0, 1.0);
    int col = 0;
    std::array<std::array<int, 4>, 4> slot{};
    for (int k = 0; k < 4; ++k)
        for (int l = k; l < 4; ++l) {
            slot[k][l] = col;
            auto x = y.middleCols(col * n, n);
            x(idx[k], idx[l]) += 1.0;
            x(idx[l], idx[k]) += k == l ? 0.0 : 1.0;
            if (k != l) {
                auto z = y.middleCols((col + 1) * n, n);
                z(idx[k], idx[l]) = i1;
                z(idx[l], idx[k]) = -i1;
            }
            col += k == l ? 1 : 2;
        }
    y = evolve_blocks(sys, s, cfg, std::move(y), opt);
    auto image = [&](int c) {
        Matrix4c b;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) b(i, j) = y(idx[i], c * n + idx[j]);
        return b;
    };

    Matrix16c sop;
    for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
            const int lo = std::min(k, l), hi = std::max(k, l);
            Matrix4c b;
            if (k == l) {
                b = image(slot[k][k]);
            } else {
                const Matrix4c x = image(slot[lo][hi]);
                const Matrix4c z = image(slot[lo][hi] + 1);
                b = 0.5 * (x + (k < l ? -i1 : i1) * z);
            }
            b = (pre(k, k) * std::conj(pre(l, l)) * post * b * post.adjoint()).eval();
            for (int j = 0; j < 4; ++j)
                for (int i = 0; i < 4; ++i) sop(i + 4 * j, k + 4 * l) = b(i, j);
        }
    ProcessFidelity r;
    r.map = process_map_from_superoperator(sop);
    r.f_p = process_fidelity_of(r.map, target);
    r.fidelity = (4.0 * r.f_p + r.map.trace_chi) / 5.0;
    r.vz_angles = vz.angles;
    r.unitary_fidelity = vz.fidelity;
    return r;
}

}  // namespace

ProcessFidelity process_fidelity(const CoupledSystem& sys, const DriveSchedule& s,
                                 const LindbladConfig& cfg, const GateTarget& target,
                                 const PropagationOptions& opt) {
    const VirtualZResult vz = virtual_z_reduce(propagate_computational(sys, s, opt), target);
    return process_fidelity_in_frame(sys, s, cfg, target, vz, opt);
}

double crossing_point(const std::vector<double>& t1, const std::vector<double>& err, double level) {
    for (size_t k = 1; k < t1.size() && k < err.size(); ++k) {
        const double a = err[k - 1] - level;
        const double b = err[k] - level;
        if (a == 0.0) return t1[k - 1];
        if ((a < 0.0) != (b < 0.0) || b == 0.0) {
            const double la = std::log(err[k - 1]), lb = std::log(err[k]), ll = std::log(level);
            const double w = (ll - la) / (lb - la);
            return std::exp(std::log(t1[k - 1]) + w * (std::log(t1[k]) - std::log(t1[k - 1])));
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

T1Scan t1_threshold_scan(const CoupledSystem& sys, const DriveSchedule& s, const GateTarget& target,
                         const std::vector<double>& t1_grid, const LindbladConfig& base,
                         const PropagationOptions& opt) {
    for (size_t k = 0; k < t1_grid.size(); ++k) {
        if (!(t1_grid[k] > 0.0)) throw InvalidParameter("t1_grid: values must be positive");
        if (k > 0 && !(t1_grid[k] > t1_grid[k - 1]))
            throw InvalidParameter("t1_grid: values must be ascending");
    }
    const VirtualZResult vz = virtual_z_reduce(propagate_computational(sys, s, opt), target);
    T1Scan scan;
    scan.t1 = t1_grid;
    scan.unitary_infidelity = 1.0 - vz.fidelity;
    const double tg = s.envelope.t_gate;
    for (double t1 : t1_grid) {
        LindbladConfig cfg = base;
        cfg.t1_fixed = cfg.t1_tunable = t1;
        const auto pf = process_fidelity_in_frame(sys, s, cfg, target, vz, opt);
        scan.infidelity.push_back(1.0 - pf.fidelity);
        scan.analytic.push_back(4.0 * tg / (5.0 * t1 * 1000.0));
    }
    scan.threshold_1e3 = crossing_point(scan.t1, scan.infidelity, 1e-3);
    scan.threshold_5_7e3 = crossing_point(scan.t1, scan.infidelity, 0.57e-2);
    return scan;
}

}  // namespace gatecraft
