#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qes/linalg.hpp"
#include "qes/quantum.hpp"

namespace qes {

using Json = nlohmann::json;

// Errors name the offending path; a missing file is InvalidInput.
Json load_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// { "rows": n, "cols": p, "real": [[...]], "imag": [[...]] } (imag optional).
ComplexMatrix matrix_from_json(const Json& j);
Json matrix_to_json(const ComplexMatrix& m);
HermitianOperator load_operator(const std::string& path);

// { "num_qubits": q, "terms": [ { "pauli": "XYZI", "coeff": c } ] }
PauliHamiltonian hamiltonian_from_json(const Json& j);
Json hamiltonian_to_json(const PauliHamiltonian& h);
PauliHamiltonian load_hamiltonian(const std::string& path);

// A circuit object { "num_qubits", "num_params", "gates": [...] } or
// { "circuits": [ circuit, ... ] }. Gate fields: kind, qubits, pauli, param,
// scale, angle.
std::vector<AnsatzCircuit> ansatz_from_json(const Json& j);
std::vector<AnsatzCircuit> load_ansatz(const std::string& path);

// Either a path to a JSON list of bitstrings or an inline comma-separated
// list such as "1010,0110".
std::vector<std::string> parse_initial_states(const std::string& arg);

// Doubles with NaN or infinity become null.
Json number_or_null(double v);
Json vector_to_json(const RealVector& v);

}  // namespace qes
