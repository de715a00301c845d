#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qes/linalg.hpp"
#include "qes/models.hpp"

namespace qes {

// Qubit k is bit k of the amplitude index; character k of a Pauli string or
// a bitstring refers to qubit k.

struct PauliTerm {
  std::string pauli;
  double coeff = 0.0;
};

struct PauliHamiltonian {
  int num_qubits = 0;
  std::vector<PauliTerm> terms;

  std::size_t num_terms() const { return terms.size(); }
  void validate() const;
  // H - c I, appended as an identity term.
  PauliHamiltonian shifted(double c) const;
};

struct QuantumState {
  int num_qubits = 0;
  ComplexVector amplitudes;

  static QuantumState basis(const std::string& bitstring);
  static QuantumState from_vector(const ComplexVector& v);  // normalizes
};

enum class GateKind { RX, RY, RZ, CNOT, PAULI_ROT };
const char* to_string(GateKind k);
GateKind parse_gate_kind(const std::string& s);

// Rotation angle is scale * params[param] when param >= 0, else `angle`.
struct Gate {
  GateKind kind = GateKind::RX;
  std::vector<int> qubits;  // RX/RY/RZ: {q}; CNOT: {control, target}
  std::string pauli;        // PAULI_ROT only
  int param = -1;
  double scale = 1.0;
  double angle = 0.0;
};

struct AnsatzCircuit {
  int num_qubits = 0;
  int num_params = 0;
  std::vector<Gate> gates;

  void validate() const;
};

// P|psi> for a single Pauli string.
ComplexVector apply_pauli(const std::string& pauli, const ComplexVector& psi);
ComplexVector apply_hamiltonian(const PauliHamiltonian& h, const ComplexVector& psi);

QuantumState apply_circuit(const AnsatzCircuit& circuit, const RealVector& params, const QuantumState& state);

constexpr int kMaxDenseQubits = 12;
HermitianOperator hamiltonian_matrix(const PauliHamiltonian& h);

double expectation(const PauliHamiltonian& h, const QuantumState& psi);
cplx overlap(const QuantumState& psi, const QuantumState& phi);  // <psi|phi>
cplx transition(const QuantumState& psi, const PauliHamiltonian& h, const QuantumState& phi);  // <psi|H|phi>

// Parameters are concatenated per state. A single circuit is shared by all
// states; otherwise circuits.size() must equal the number of states.
int total_params(const std::vector<AnsatzCircuit>& circuits, std::size_t num_states);
std::vector<QuantumState> prepare_states(const std::vector<AnsatzCircuit>& circuits,
                                         const std::vector<std::string>& initial_states, const RealVector& params);

// Objective from the B_ij = <psi_i|H|psi_j> and C_ij = <psi_i|psi_j>
// matrices; equals model_value on the statevector columns.
double vqe_objective(const ModelConfig& cfg, const PauliHamiltonian& h, const std::vector<AnsatzCircuit>& circuits,
                     const std::vector<std::string>& initial_states, const RealVector& params);
double vqe_objective_from_states(const ModelConfig& cfg, const PauliHamiltonian& h,
                                 const std::vector<QuantumState>& states);

struct ResourceReport {
  Model model = Model::QOMM;
  std::uint64_t hamiltonian_circuits = 0;
  std::uint64_t regularization_circuits = 0;
};

ResourceReport resource_count(Model model, std::uint64_t p, std::uint64_t n_u);

struct RitzResult {
  RealVector values;
  ComplexMatrix r;
};
RitzResult rayleigh_ritz(const std::vector<QuantumState>& states, const PauliHamiltonian& h);
// Columns sum_j states_j R_ji.
ComplexMatrix ritz_vectors(const std::vector<QuantumState>& states, const ComplexMatrix& r);

// Basis indices reachable from the initial states through the flip patterns
// of every Hamiltonian term and every circuit gate. The circuits can only
// produce states inside this span, so it fixes the reference spectrum.
std::vector<std::uint64_t> reachable_basis(const PauliHamiltonian& h, const std::vector<AnsatzCircuit>& circuits,
                                           const std::vector<std::string>& initial_states);
// Ascending eigenvalues of H compressed to the given basis indices.
RealVector restricted_spectrum(const PauliHamiltonian& h, const std::vector<std::uint64_t>& basis);

}  // namespace qes
