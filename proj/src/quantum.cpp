#include "qes/quantum.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <set>

#include "qes/error.hpp"

namespace qes {

namespace {

struct PauliMasks {
  std::uint64_t flip = 0;   // X or Y
  std::uint64_t phase = 0;  // Z or Y
  int num_y = 0;
};

PauliMasks masks_of(const std::string& pauli) {
  PauliMasks m;
  for (std::size_t k = 0; k < pauli.size(); ++k) {
    const std::uint64_t bit = std::uint64_t{1} << k;
    switch (pauli[k]) {
      case 'I': break;
      case 'X': m.flip |= bit; break;
      case 'Y': m.flip |= bit; m.phase |= bit; ++m.num_y; break;
      case 'Z': m.phase |= bit; break;
      default: throw Error(ErrorKind::InvalidInput, "invalid Pauli character in '" + pauli + "'");
    }
  }
  return m;
}

cplx i_power(int k) {
  switch (k & 3) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

int qubits_of(const ComplexVector& v) {
  const auto n = static_cast<std::uint64_t>(v.size());
  if (n == 0 || !std::has_single_bit(n)) throw Error(ErrorKind::DimensionMismatch, "state length is not a power of two");
  return std::countr_zero(n);
}

void require_same(int a, int b, const char* what) {
  if (a != b) throw Error(ErrorKind::DimensionMismatch, std::string(what) + ": qubit counts differ");
}

}  // namespace

void PauliHamiltonian::validate() const {
  if (num_qubits < 1 || num_qubits > 62) throw Error(ErrorKind::InvalidInput, "num_qubits must lie in [1, 62]");
  if (terms.empty()) throw Error(ErrorKind::InvalidInput, "Hamiltonian has no terms");
  for (const auto& t : terms) {
    if (static_cast<int>(t.pauli.size()) != num_qubits)
      throw Error(ErrorKind::InvalidInput, "Pauli string '" + t.pauli + "' has wrong length");
    masks_of(t.pauli);
    if (!std::isfinite(t.coeff)) throw Error(ErrorKind::InvalidInput, "non-finite coefficient");
  }
}

PauliHamiltonian PauliHamiltonian::shifted(double c) const {
  PauliHamiltonian h = *this;
  h.terms.push_back({std::string(static_cast<std::size_t>(num_qubits), 'I'), -c});
  return h;
}

QuantumState QuantumState::basis(const std::string& bitstring) {
  if (bitstring.empty() || bitstring.size() > 62) throw Error(ErrorKind::InvalidInput, "bad bitstring length");
  std::uint64_t idx = 0;
  for (std::size_t k = 0; k < bitstring.size(); ++k) {
    if (bitstring[k] == '1') idx |= std::uint64_t{1} << k;
    else if (bitstring[k] != '0') throw Error(ErrorKind::InvalidInput, "bitstring '" + bitstring + "' is not binary");
  }
  QuantumState s;
  s.num_qubits = static_cast<int>(bitstring.size());
  s.amplitudes = ComplexVector::Zero(Eigen::Index{1} << s.num_qubits);
  s.amplitudes(static_cast<Eigen::Index>(idx)) = 1.0;
  return s;
}

QuantumState QuantumState::from_vector(const ComplexVector& v) {
  QuantumState s;
  s.num_qubits = qubits_of(v);
  const double nrm = v.norm();
  if (!(nrm > 0) || !std::isfinite(nrm)) throw Error(ErrorKind::InvalidInput, "state vector must be nonzero and finite");
  s.amplitudes = v / nrm;
  return s;
}

const char* to_string(GateKind k) {
  switch (k) {
    case GateKind::RX: return "RX";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::CNOT: return "CNOT";
    case GateKind::PAULI_ROT: return "PAULI_ROT";
  }
  return "?";
}

GateKind parse_gate_kind(const std::string& s) {
  if (s == "RX") return GateKind::RX;
  if (s == "RY") return GateKind::RY;
  if (s == "RZ") return GateKind::RZ;
  if (s == "CNOT") return GateKind::CNOT;
  if (s == "PAULI_ROT") return GateKind::PAULI_ROT;
  throw Error(ErrorKind::InvalidInput, "unknown gate kind '" + s + "'");
}

void AnsatzCircuit::validate() const {
  if (num_qubits < 1) throw Error(ErrorKind::InvalidInput, "circuit needs at least one qubit");
  if (num_params < 0) throw Error(ErrorKind::InvalidInput, "negative parameter count");
  for (const auto& g : gates) {
    const std::size_t want = g.kind == GateKind::CNOT ? 2 : (g.kind == GateKind::PAULI_ROT ? 0 : 1);
    if (g.kind != GateKind::PAULI_ROT && g.qubits.size() != want)
      throw Error(ErrorKind::IndexError, std::string(to_string(g.kind)) + " gate has wrong qubit count");
    for (int q : g.qubits)
      if (q < 0 || q >= num_qubits) throw Error(ErrorKind::IndexError, "qubit index " + std::to_string(q) + " out of range");
    if (g.kind == GateKind::CNOT && g.qubits[0] == g.qubits[1])
      throw Error(ErrorKind::IndexError, "CNOT control equals target");
    if (g.kind == GateKind::PAULI_ROT) {
      if (static_cast<int>(g.pauli.size()) != num_qubits)
        throw Error(ErrorKind::IndexError, "Pauli rotation string '" + g.pauli + "' has wrong length");
      masks_of(g.pauli);
    }
    if (g.param >= num_params) throw Error(ErrorKind::IndexError, "parameter index " + std::to_string(g.param) + " out of range");
  }
}

ComplexVector apply_pauli(const std::string& pauli, const ComplexVector& psi) {
  const PauliMasks m = masks_of(pauli);
  const cplx base = i_power(m.num_y);
  ComplexVector out(psi.size());
  for (Eigen::Index b = 0; b < psi.size(); ++b) {
    const auto ub = static_cast<std::uint64_t>(b);
    const double sign = (std::popcount(ub & m.phase) & 1) ? -1.0 : 1.0;
    out(static_cast<Eigen::Index>(ub ^ m.flip)) = base * sign * psi(b);
  }
  return out;
}

ComplexVector apply_hamiltonian(const PauliHamiltonian& h, const ComplexVector& psi) {
  if (psi.size() != (Eigen::Index{1} << h.num_qubits))
    throw Error(ErrorKind::DimensionMismatch, "state and Hamiltonian sizes differ");
  ComplexVector out = ComplexVector::Zero(psi.size());
  for (const auto& t : h.terms) out += t.coeff * apply_pauli(t.pauli, psi);
  return out;
}

namespace {

void rotate_pauli(ComplexVector& psi, const std::string& pauli, double theta) {
  psi = std::cos(theta / 2) * psi - cplx(0, std::sin(theta / 2)) * apply_pauli(pauli, psi);
}

std::string single_pauli(int nq, int q, char c) {
  std::string s(static_cast<std::size_t>(nq), 'I');
  s[static_cast<std::size_t>(q)] = c;
  return s;
}

}  // namespace

QuantumState apply_circuit(const AnsatzCircuit& circuit, const RealVector& params, const QuantumState& state) {
  circuit.validate();
  require_same(circuit.num_qubits, state.num_qubits, "apply_circuit");
  if (params.size() != circuit.num_params)
    throw Error(ErrorKind::DimensionMismatch, "expected " + std::to_string(circuit.num_params) + " parameters");
  ComplexVector psi = state.amplitudes;
  const int nq = circuit.num_qubits;
  for (const auto& g : circuit.gates) {
    const double theta = g.param >= 0 ? g.scale * params(g.param) : g.angle;
    switch (g.kind) {
      case GateKind::RX: rotate_pauli(psi, single_pauli(nq, g.qubits[0], 'X'), theta); break;
      case GateKind::RY: rotate_pauli(psi, single_pauli(nq, g.qubits[0], 'Y'), theta); break;
      case GateKind::RZ: rotate_pauli(psi, single_pauli(nq, g.qubits[0], 'Z'), theta); break;
      case GateKind::PAULI_ROT: rotate_pauli(psi, g.pauli, theta); break;
      case GateKind::CNOT: {
        const std::uint64_t c = std::uint64_t{1} << g.qubits[0];
        const std::uint64_t t = std::uint64_t{1} << g.qubits[1];
        for (Eigen::Index b = 0; b < psi.size(); ++b) {
          const auto ub = static_cast<std::uint64_t>(b);
          if ((ub & c) && !(ub & t)) std::swap(psi(b), psi(static_cast<Eigen::Index>(ub | t)));
        }
        break;
      }
    }
  }
  return {state.num_qubits, psi};
}

HermitianOperator hamiltonian_matrix(const PauliHamiltonian& h) {
  h.validate();
  if (h.num_qubits > kMaxDenseQubits)
    throw Error(ErrorKind::TooLarge, "dense matrix limited to " + std::to_string(kMaxDenseQubits) + " qubits");
  const Eigen::Index dim = Eigen::Index{1} << h.num_qubits;
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  for (const auto& t : h.terms) {
    const PauliMasks pm = masks_of(t.pauli);
    const cplx base = i_power(pm.num_y) * t.coeff;
    for (Eigen::Index b = 0; b < dim; ++b) {
      const auto ub = static_cast<std::uint64_t>(b);
      const double sign = (std::popcount(ub & pm.phase) & 1) ? -1.0 : 1.0;
      m(static_cast<Eigen::Index>(ub ^ pm.flip), b) += base * sign;
    }
  }
  return HermitianOperator(m);
}

double expectation(const PauliHamiltonian& h, const QuantumState& psi) {
  require_same(h.num_qubits, psi.num_qubits, "expectation");
  return psi.amplitudes.dot(apply_hamiltonian(h, psi.amplitudes)).real();
}

cplx overlap(const QuantumState& psi, const QuantumState& phi) {
  require_same(psi.num_qubits, phi.num_qubits, "overlap");
  return psi.amplitudes.dot(phi.amplitudes);
}

cplx transition(const QuantumState& psi, const PauliHamiltonian& h, const QuantumState& phi) {
  require_same(psi.num_qubits, phi.num_qubits, "transition");
  require_same(h.num_qubits, phi.num_qubits, "transition");
  return psi.amplitudes.dot(apply_hamiltonian(h, phi.amplitudes));
}

int total_params(const std::vector<AnsatzCircuit>& circuits, std::size_t num_states) {
  if (circuits.empty()) throw Error(ErrorKind::InvalidInput, "no ansatz circuits");
  if (circuits.size() != 1 && circuits.size() != num_states)
    throw Error(ErrorKind::DimensionMismatch, "need one circuit or one per initial state");
  int n = 0;
  for (std::size_t i = 0; i < num_states; ++i) n += circuits[circuits.size() == 1 ? 0 : i].num_params;
  return n;
}

std::vector<QuantumState> prepare_states(const std::vector<AnsatzCircuit>& circuits,
                                         const std::vector<std::string>& initial_states, const RealVector& params) {
  const int np = total_params(circuits, initial_states.size());
  if (params.size() != np) throw Error(ErrorKind::DimensionMismatch, "expected " + std::to_string(np) + " parameters");
  std::vector<QuantumState> out;
  Eigen::Index off = 0;
  for (std::size_t i = 0; i < initial_states.size(); ++i) {
    const AnsatzCircuit& c = circuits[circuits.size() == 1 ? 0 : i];
    out.push_back(apply_circuit(c, params.segment(off, c.num_params), QuantumState::basis(initial_states[i])));
    off += c.num_params;
  }
  return out;
}

double vqe_objective_from_states(const ModelConfig& cfg, const PauliHamiltonian& h,
                                 const std::vector<QuantumState>& states) {
  const auto p = static_cast<Eigen::Index>(states.size());
  cfg.validate(p);
  ComplexMatrix b(p, p), c(p, p);
  std::vector<ComplexVector> hpsi;
  for (const auto& s : states) {
    require_same(h.num_qubits, s.num_qubits, "vqe_objective");
    hpsi.push_back(apply_hamiltonian(h, s.amplitudes));
  }
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j) {
      b(i, j) = states[i].amplitudes.dot(hpsi[j]);
      c(i, j) = states[i].amplitudes.dot(states[j].amplitudes);
    }
  double offdiag = 0.0, offdiag_sq = 0.0;
  for (Eigen::Index j = 1; j < p; ++j)
    for (Eigen::Index i = 0; i < j; ++i) {
      offdiag += std::abs(c(i, j));
      offdiag_sq += std::norm(c(i, j));
    }
  switch (cfg.model) {
    case Model::QOMM:
      return checked_real((2.0 * ComplexMatrix::Identity(p, p) - c).cwiseProduct(b.transpose()).sum(), "qOMM value");
    case Model::QTPM: {
      const double tr = checked_real(b.trace(), "qTPM trace");
      double diag_sq = 0.0;
      for (Eigen::Index i = 0; i < p; ++i) diag_sq += std::norm(c(i, i));
      return 0.5 * tr + 0.25 * cfg.mu * (diag_sq + 2.0 * offdiag_sq);
    }
    case Model::QL1M: return checked_real(b.trace(), "qL1M trace") + cfg.mu1 * offdiag;
    case Model::WEIGHTED_QL1M: {
      cplx tr = 0;
      for (Eigen::Index i = 0; i < p; ++i) tr += cfg.weights(i) * b(i, i);
      return checked_real(tr, "weighted qL1M trace") + cfg.mu1 * offdiag;
    }
  }
  return 0.0;
}

double vqe_objective(const ModelConfig& cfg, const PauliHamiltonian& h, const std::vector<AnsatzCircuit>& circuits,
                     const std::vector<std::string>& initial_states, const RealVector& params) {
  return vqe_objective_from_states(cfg, h, prepare_states(circuits, initial_states, params));
}

ResourceReport resource_count(Model model, std::uint64_t p, std::uint64_t n_u) {
  if (p < 1 || n_u < 1) throw Error(ErrorKind::InvalidInput, "p and N_U must be at least 1");
  ResourceReport r;
  r.model = model;
  if (model == Model::QOMM) {
    r.hamiltonian_circuits = p * p * n_u;
    r.regularization_circuits = p * (p - 1);
  } else {
    r.hamiltonian_circuits = p * n_u;
    r.regularization_circuits = p * (p - 1) / 2;
  }
  return r;
}

RitzResult rayleigh_ritz(const std::vector<QuantumState>& states, const PauliHamiltonian& h) {
  const auto p = static_cast<Eigen::Index>(states.size());
  if (p == 0) throw Error(ErrorKind::InvalidInput, "no states");
  ComplexMatrix x(states[0].amplitudes.size(), p);
  for (Eigen::Index j = 0; j < p; ++j) {
    require_same(states[j].num_qubits, h.num_qubits, "rayleigh_ritz");
    x.col(j) = states[j].amplitudes;
  }
  ComplexMatrix hx(x.rows(), p);
  for (Eigen::Index j = 0; j < p; ++j) hx.col(j) = apply_hamiltonian(h, x.col(j));
  const ComplexMatrix b = x.adjoint() * hx;
  const ComplexMatrix c = x.adjoint() * x;
  GeneralizedEigen ge = generalized_eigh(0.5 * (b + b.adjoint()), 0.5 * (c + c.adjoint()));
  return {ge.values, ge.r};
}

ComplexMatrix ritz_vectors(const std::vector<QuantumState>& states, const ComplexMatrix& r) {
  const auto p = static_cast<Eigen::Index>(states.size());
  ComplexMatrix x(states.at(0).amplitudes.size(), p);
  for (Eigen::Index j = 0; j < p; ++j) x.col(j) = states[j].amplitudes;
  return x * r;
}

std::vector<std::uint64_t> reachable_basis(const PauliHamiltonian& h, const std::vector<AnsatzCircuit>& circuits,
                                           const std::vector<std::string>& initial_states) {
  h.validate();
  if (h.num_qubits > kMaxDenseQubits) throw Error(ErrorKind::TooLarge, "closure limited to dense sizes");
  std::set<std::uint64_t> flips;
  // CNOT flips the target only when the control bit is set.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> cnots;
  for (const auto& t : h.terms)
    if (t.coeff != 0.0) flips.insert(masks_of(t.pauli).flip);
  for (const auto& c : circuits) {
    c.validate();
    for (const auto& g : c.gates) {
      switch (g.kind) {
        case GateKind::RX:
        case GateKind::RY: flips.insert(std::uint64_t{1} << g.qubits[0]); break;
        case GateKind::RZ: break;
        case GateKind::PAULI_ROT: flips.insert(masks_of(g.pauli).flip); break;
        case GateKind::CNOT:
          cnots.emplace_back(std::uint64_t{1} << g.qubits[0], std::uint64_t{1} << g.qubits[1]);
          break;
      }
    }
  }
  flips.erase(0);

  std::set<std::uint64_t> seen;
  std::deque<std::uint64_t> queue;
  for (const auto& s : initial_states) {
    const QuantumState b = QuantumState::basis(s);
    require_same(b.num_qubits, h.num_qubits, "reachable_basis");
    Eigen::Index idx;
    b.amplitudes.cwiseAbs().maxCoeff(&idx);
    if (seen.insert(static_cast<std::uint64_t>(idx)).second) queue.push_back(static_cast<std::uint64_t>(idx));
  }
  while (!queue.empty()) {
    const std::uint64_t b = queue.front();
    queue.pop_front();
    auto visit = [&](std::uint64_t nb) {
      if (seen.insert(nb).second) queue.push_back(nb);
    };
    for (std::uint64_t f : flips) visit(b ^ f);
    for (const auto& [c, t] : cnots)
      if (b & c) visit(b ^ t);
  }
  return {seen.begin(), seen.end()};
}

RealVector restricted_spectrum(const PauliHamiltonian& h, const std::vector<std::uint64_t>& basis) {
  const HermitianOperator full = hamiltonian_matrix(h);
  const auto k = static_cast<Eigen::Index>(basis.size());
  ComplexMatrix m(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      m(i, j) = full.matrix()(static_cast<Eigen::Index>(basis[i]), static_cast<Eigen::Index>(basis[j]));
  return eigh(HermitianOperator(m)).values;
}

}  // namespace qes
