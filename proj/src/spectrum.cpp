#include "gatecraft/spectrum.hpp"

#include "gatecraft/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace gatecraft {

namespace {

std::string field(std::string_view path, std::string_view name) {
    std::string s(path);
    s += '.';
    s += name;
    return s;
}

// Labels up to |22> take part in every gate mechanism we model, so a
// conflict there is fatal. Higher states may be resolved greedily.
bool protected_label(BareLabel b) { return b.fixed <= 2 && b.tunable <= 2; }

}  // namespace

void validate(const QubitParams& q, std::string_view path) {
    if (!(q.e_c > 0.0) || !std::isfinite(q.e_c))
        throw InvalidParameter(field(path, "e_c") + ": must be a positive finite number");
    if (!(q.e_j > 0.0) || !std::isfinite(q.e_j))
        throw InvalidParameter(field(path, "e_j") + ": must be a positive finite number");
}

bool in_transmon_regime(const QubitParams& q) { return q.e_j / q.e_c >= 20.0; }

void validate(const CircuitParams& p, std::string_view path) {
    validate(p.fixed, field(path, "fixed"));
    validate(p.tunable, field(path, "tunable"));
    if (!(p.j_c >= 0.0) || !std::isfinite(p.j_c))
        throw InvalidParameter(field(path, "j_c") + ": must be a non-negative finite number");
}

std::vector<std::string> circuit_warnings(const CircuitParams& p) {
    std::vector<std::string> out;
    if (!in_transmon_regime(p.fixed))
        out.push_back("circuit.fixed: e_j/e_c below 20, outside the transmon regime");
    if (!in_transmon_regime(p.tunable))
        out.push_back("circuit.tunable: e_j/e_c below 20, outside the transmon regime");
    if (p.j_c > 0.1) out.push_back("circuit.j_c: above 0.1 GHz, weak-coupling picture breaks down");
    return out;
}

void validate(const TruncationConfig& t, std::string_view path) {
    if (t.levels_per_qubit < 3)
        throw InvalidParameter(field(path, "levels_per_qubit") + ": must be at least 3");
    if (t.charge_cutoff < 3 * t.levels_per_qubit)
        throw InvalidParameter(field(path, "charge_cutoff") +
                               ": must be at least 3 * levels_per_qubit");
}

RealMatrix charge_operator(int cutoff) {
    const int n = 2 * cutoff + 1;
    RealMatrix m = RealMatrix::Zero(n, n);
    for (int k = 0; k < n; ++k) m(k, k) = k - cutoff;
    return m;
}

RealMatrix minus_cos_phi(int cutoff) {
    const int n = 2 * cutoff + 1;
    RealMatrix m = RealMatrix::Zero(n, n);
    for (int k = 0; k + 1 < n; ++k) m(k, k + 1) = m(k + 1, k) = -0.5;
    return m;
}

RealMatrix build_charge_hamiltonian(const QubitParams& q, int cutoff) {
    if (!(q.e_c > 0.0)) throw InvalidParameter("e_c: must be positive");
    if (q.e_j < 0.0) throw InvalidParameter("e_j: must be non-negative");
    if (cutoff < 1) throw InvalidParameter("charge_cutoff: must be at least 1");
    RealMatrix h = q.e_j * minus_cos_phi(cutoff);
    for (int k = -cutoff; k <= cutoff; ++k) h(k + cutoff, k + cutoff) = 4.0 * q.e_c * k * k;
    return h;
}

QubitEigensystem diagonalize_qubit(const QubitParams& q, const TruncationConfig& trunc) {
    validate(q);
    validate(trunc);
    const RealMatrix h = build_charge_hamiltonian(q, trunc.charge_cutoff);
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(h);
    if (es.info() != Eigen::Success) {
        std::ostringstream os;
        os << "eigensolver failed for e_c=" << q.e_c << " e_j=" << q.e_j;
        throw NumericError(os.str());
    }
    const int d = trunc.levels_per_qubit;
    QubitEigensystem out;
    out.vectors = es.eigenvectors().leftCols(d);
    for (int c = 0; c < d; ++c) {
        Eigen::Index imax = 0;
        out.vectors.col(c).cwiseAbs().maxCoeff(&imax);
        if (out.vectors(imax, c) < 0.0) out.vectors.col(c) *= -1.0;
    }
    const RealVector& e = es.eigenvalues();
    auto& sp = out.spectrum;
    for (int i = 0; i < d; ++i) sp.levels.push_back(e(i) - e(0));
    for (int i = 0; i + 1 < d; ++i) sp.transitions.push_back(sp.levels[i + 1] - sp.levels[i]);
    for (int i = 0; i + 1 < static_cast<int>(sp.transitions.size()); ++i)
        sp.anharmonicities.push_back(sp.transitions[i] - sp.transitions[i + 1]);
    return out;
}

CoupledSystem::CoupledSystem(const CircuitParams& p, const TruncationConfig& trunc)
    : params_(p), trunc_(trunc) {
    validate(p);
    validate(trunc);
    fixed_ = diagonalize_qubit(p.fixed, trunc);
    tunable_ = diagonalize_qubit(p.tunable, trunc);

    const int d = levels();
    const int n = dim();
    const int cut = trunc.charge_cutoff;
    const RealMatrix nq = charge_operator(cut);
    const RealMatrix nf = fixed_.vectors.transpose() * nq * fixed_.vectors;
    const RealMatrix nt = tunable_.vectors.transpose() * nq * tunable_.vectors;
    const RealMatrix ct = tunable_.vectors.transpose() * minus_cos_phi(cut) * tunable_.vectors;

    h_fixed_ = RealMatrix::Zero(d, d);
    h_tunable_ = RealMatrix::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        h_fixed_(i, i) = fixed_.spectrum.levels[i];
        h_tunable_(i, i) = tunable_.spectrum.levels[i];
    }

    const RealMatrix id = RealMatrix::Identity(d, d);
    auto kron = [&](const RealMatrix& a, const RealMatrix& b) {
        RealMatrix k(n, n);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) k.block(i * d, j * d, d, d) = a(i, j) * b;
        return k;
    };
    n_fixed_ = kron(nf, id);
    n_tunable_ = kron(id, nt);
    v_drive_ = kron(id, ct);
    h_static_ = kron(h_fixed_, id) + kron(id, h_tunable_) + p.j_c * kron(nf, nt);

    Eigen::SelfAdjointEigenSolver<RealMatrix> es(h_static_);
    if (es.info() != Eigen::Success) throw NumericError("coupled eigensolver failed");
    energies_ = es.eigenvalues();
    vectors_ = es.eigenvectors();
    assign_labels();
    for (int c = 0; c < n; ++c) {
        const int b = bare_index(labels_[c]);
        if (vectors_(b, c) < 0.0) vectors_.col(c) *= -1.0;
    }
    v_dressed_ = vectors_.transpose() * v_drive_ * vectors_;
    v_dressed_ = 0.5 * (v_dressed_ + v_dressed_.transpose()).eval();
}

void CoupledSystem::assign_labels() {
    const int n = dim();
    const int d = levels();
    const RealMatrix ov = vectors_.cwiseAbs2();  // (bare, dressed)

    // Each dressed state claims its maximum-overlap bare label. When two
    // claim the same label the larger overlap wins, then the lower energy.
    std::vector<int> claim(n);
    for (int c = 0; c < n; ++c) {
        Eigen::Index b = 0;
        const double top = ov.col(c).maxCoeff(&b);
        claim[c] = static_cast<int>(b);
        // A tie at the top means the bare labels are exactly hybridized.
        for (int other = 0; other < n; ++other) {
            const BareLabel lb{other / d, other % d};
            if (other != b && top - ov(other, c) < 1e-9 && protected_label(lb)) {
                std::ostringstream os;
                os << "dressed state " << c << " overlaps |" << BareLabel{claim[c] / d, claim[c] % d}.str()
                   << "> and |" << lb.str() << "> equally";
                throw LabelingError(os.str());
            }
        }
    }
    std::vector<int> owner(n, -1);
    std::vector<int> losers;
    for (int c = 0; c < n; ++c) {
        int& o = owner[claim[c]];
        if (o < 0) {
            o = c;
        } else if (ov(claim[c], c) > ov(claim[c], o)) {
            losers.push_back(o);
            o = c;
        } else {
            losers.push_back(c);
        }
    }
    for (int c : losers) {
        const BareLabel b{claim[c] / d, claim[c] % d};
        if (protected_label(b)) {
            std::ostringstream os;
            os << "dressed states " << c << " and " << owner[claim[c]]
               << " both have maximum overlap with |" << b.str() << ">";
            throw LabelingError(os.str());
        }
    }
    // Hand remaining labels to the losers, largest overlap first.
    while (!losers.empty()) {
        double best = -1.0;
        int bi = -1, li = -1;
        for (int k = 0; k < static_cast<int>(losers.size()); ++k)
            for (int b = 0; b < n; ++b)
                if (owner[b] < 0 && ov(b, losers[k]) > best) {
                    best = ov(b, losers[k]);
                    bi = b;
                    li = k;
                }
        owner[bi] = losers[li];
        losers.erase(losers.begin() + li);
    }
    labels_.assign(n, {});
    dressed_by_bare_.assign(n, -1);
    for (int b = 0; b < n; ++b) {
        labels_[owner[b]] = BareLabel{b / d, b % d};
        dressed_by_bare_[b] = owner[b];
    }
}

int CoupledSystem::index_of(BareLabel b) const {
    if (b.fixed < 0 || b.tunable < 0 || b.fixed >= levels() || b.tunable >= levels())
        throw LabelingError("label |" + b.str() + "> outside the truncated space");
    return dressed_by_bare_[bare_index(b)];
}

double CoupledSystem::overlap(BareLabel b) const {
    const double v = vectors_(bare_index(b), index_of(b));
    return v * v;
}

RealMatrix CoupledSystem::hamiltonian_at(double ej_tunable) const {
    const int d = levels();
    const auto& v = tunable_.vectors;
    const int cut = trunc_.charge_cutoff;
    const RealMatrix delta =
        v.transpose() *
        (build_charge_hamiltonian({params_.tunable.e_c, ej_tunable}, cut) -
         build_charge_hamiltonian(params_.tunable, cut)) *
        v;
    RealMatrix h = h_static_;
    for (int i = 0; i < d; ++i) h.block(i * d, i * d, d, d) += delta;
    return h;
}

std::array<int, 4> CoupledSystem::computational_indices() const {
    return {index_of({0, 0}), index_of({0, 1}), index_of({1, 0}), index_of({1, 1})};
}

double transition_frequency(const CoupledSystem& sys, BareLabel a, BareLabel b) {
    return sys.energy(b) - sys.energy(a);
}

double static_zz_rate(const CoupledSystem& sys) {
    return sys.energy({0, 0}) + sys.energy({1, 1}) - sys.energy({0, 1}) - sys.energy({1, 0});
}

ExchangeCoupling effective_exchange_g(const CoupledSystem& sys) {
    const auto& p = sys.params();
    const RealMatrix coupling = p.j_c * (sys.n_fixed() * sys.n_tunable());
    const auto a = sys.dressed_vectors().col(sys.index_of({0, 1}));
    const auto b = sys.dressed_vectors().col(sys.index_of({1, 0}));
    ExchangeCoupling g;
    g.matrix_element = std::abs(a.dot(coupling * b));
    g.harmonic_form = p.j_c * std::pow(p.fixed.e_j / (32.0 * p.fixed.e_c), 0.25) *
                      std::pow(p.tunable.e_j / (32.0 * p.tunable.e_c), 0.25);
    g.printed_form = 4.0 * p.j_c *
                     std::pow(p.fixed.e_j * p.tunable.e_j / (4.0 * p.fixed.e_c * p.tunable.e_c), 0.25);
    return g;
}

}  // namespace gatecraft
