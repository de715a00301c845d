#include <gtest/gtest.h>

#include <cmath>

#include "qes/error.hpp"
#include "qes/io.hpp"
#include "qes/quantum.hpp"
#include "test_support.hpp"

using namespace qes;

namespace {

const std::string kData = QES_DATA_DIR;

std::string random_pauli(int q, Rng& rng) {
  static const char kLetters[] = "IXYZ";
  std::string s;
  for (int k = 0; k < q; ++k) s += kLetters[rng() % 4];
  return s;
}

AnsatzCircuit random_circuit(int q, int params, int gates, Rng& rng) {
  AnsatzCircuit c;
  c.num_qubits = q;
  c.num_params = params;
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  for (int g = 0; g < gates; ++g) {
    Gate gate;
    gate.kind = static_cast<GateKind>(rng() % 5);
    const int a = static_cast<int>(rng() % static_cast<std::uint64_t>(q));
    if (gate.kind == GateKind::CNOT) {
      if (q < 2) gate.kind = GateKind::RY;
      else gate.qubits = {a, (a + 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(q - 1))) % q};
    }
    if (gate.kind != GateKind::CNOT) gate.qubits = {a};
    if (gate.kind == GateKind::PAULI_ROT) {
      gate.qubits.clear();
      gate.pauli = random_pauli(q, rng);
    }
    if (gate.kind != GateKind::CNOT) {
      if (rng() % 3 == 0) gate.angle = ang(rng);
      else gate.param = static_cast<int>(rng() % static_cast<std::uint64_t>(params));
    }
    c.gates.push_back(gate);
  }
  return c;
}

PauliHamiltonian random_hamiltonian(int q, int terms, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  PauliHamiltonian h;
  h.num_qubits = q;
  for (int t = 0; t < terms; ++t) h.terms.push_back({random_pauli(q, rng), n(rng)});
  return h;
}

QuantumState random_state(int q, Rng& rng) {
  return QuantumState::from_vector(random_gaussian(Eigen::Index{1} << q, 1, rng).col(0));
}

RealVector random_params(int n, Rng& rng) {
  std::uniform_real_distribution<double> u(-M_PI, M_PI);
  RealVector v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

}  // namespace

TEST(Pauli, QubitZeroIsLeastSignificantBit) {
  const ComplexVector zero = QuantumState::basis("0").amplitudes;
  EXPECT_NEAR(expectation({1, {{"Z", 1.0}}}, QuantumState::basis("0")), 1.0, 1e-15);
  EXPECT_NEAR(expectation({1, {{"Z", 1.0}}}, QuantumState::basis("1")), -1.0, 1e-15);
  // Character 0 flips qubit 0, which is bit 0 of the index.
  const ComplexVector out = apply_pauli("XI", QuantumState::basis("00").amplitudes);
  EXPECT_NEAR(std::abs(out(1)), 1.0, 1e-15);
  EXPECT_EQ(QuantumState::basis("01").amplitudes(2), cplx(1.0));
  const ComplexVector y = apply_pauli("Y", zero);
  EXPECT_NEAR(std::abs(y(1) - cplx(0.0, 1.0)), 0.0, 1e-15);
}

TEST(Pauli, HamiltonianMatrixExamples) {
  const HermitianOperator z = hamiltonian_matrix({1, {{"Z", 1.0}}});
  EXPECT_EQ(z.matrix()(0, 0), cplx(1.0));
  EXPECT_EQ(z.matrix()(1, 1), cplx(-1.0));
  const HermitianOperator xx = hamiltonian_matrix({2, {{"XX", 0.5}}});
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_EQ(xx.matrix()(i, j), cplx(i + j == 3 ? 0.5 : 0.0));
  PauliHamiltonian big{kMaxDenseQubits + 1, {{std::string(kMaxDenseQubits + 1, 'Z'), 1.0}}};
  try {
    hamiltonian_matrix(big);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TooLarge);
  }
}

TEST(Pauli, MatrixMatchesStatevectorAction) {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const int q = 1 + trial % 5;
    const PauliHamiltonian h = random_hamiltonian(q, 6, rng);
    const QuantumState psi = random_state(q, rng);
    const ComplexVector dense = hamiltonian_matrix(h).matrix() * psi.amplitudes;
    EXPECT_LE((dense - apply_hamiltonian(h, psi.amplitudes)).norm(), 1e-12);
  }
}

TEST(Pauli, ValidationErrors) {
  PauliHamiltonian h{2, {{"XQ", 1.0}}};
  EXPECT_THROW(h.validate(), Error);
  PauliHamiltonian len{2, {{"XXX", 1.0}}};
  EXPECT_THROW(len.validate(), Error);
}

TEST(H2, SectorSpectrumMatchesDenseOracle) {
  const PauliHamiltonian h = load_hamiltonian(kData + "/h2_sto3g_4q.json");
  EXPECT_EQ(h.num_terms(), 15u);
  const RealVector full = eigh(hamiltonian_matrix(h)).values;
  // numpy.linalg.eigvalsh on the same terms.
  EXPECT_NEAR(full(0), -1.857275030202379, 1e-10);
  EXPECT_NEAR(full(1), -1.25633907300325, 1e-10);
  const std::vector<AnsatzCircuit> ansatz = load_ansatz(kData + "/h2_uccsd_ansatz.json");
  const std::vector<std::string> init = {"1010", "0110", "1001"};
  const std::vector<std::uint64_t> basis = reachable_basis(h, ansatz, init);
  const RealVector sector = restricted_spectrum(h, basis);
  ASSERT_EQ(sector.size(), 4);
  EXPECT_NEAR(sector(0), -1.857275030202379, 1e-10);
  EXPECT_NEAR(sector(1), -1.244584549813327, 1e-10);
  EXPECT_NEAR(sector(2), -0.882722150244865, 1e-10);
  EXPECT_NEAR(sector(3), -0.224911252830871, 1e-10);
}

TEST(Circuit, GateExamples) {
  AnsatzCircuit empty{1, 0, {}};
  const QuantumState zero = QuantumState::basis("0");
  EXPECT_EQ(apply_circuit(empty, RealVector(), zero).amplitudes, zero.amplitudes);

  AnsatzCircuit rx{1, 0, {}};
  Gate g;
  g.kind = GateKind::RX;
  g.qubits = {0};
  g.angle = M_PI;
  rx.gates.push_back(g);
  const ComplexVector out = apply_circuit(rx, RealVector(), zero).amplitudes;
  EXPECT_NEAR(std::abs(out(0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(out(1) - cplx(0.0, -1.0)), 0.0, 1e-15);

  AnsatzCircuit cnot{2, 0, {}};
  Gate c;
  c.kind = GateKind::CNOT;
  c.qubits = {0, 1};
  cnot.gates.push_back(c);
  EXPECT_EQ(apply_circuit(cnot, RealVector(), QuantumState::basis("10")).amplitudes,
            QuantumState::basis("11").amplitudes);
  EXPECT_EQ(apply_circuit(cnot, RealVector(), QuantumState::basis("01")).amplitudes,
            QuantumState::basis("01").amplitudes);
}

TEST(Circuit, ZeroParamsPauliRotationsAreIdentity) {
  const std::vector<AnsatzCircuit> ansatz = load_ansatz(kData + "/h2_uccsd_ansatz.json");
  const QuantumState s = QuantumState::basis("1010");
  const QuantumState out = apply_circuit(ansatz[0], RealVector::Zero(ansatz[0].num_params), s);
  EXPECT_LE((out.amplitudes - s.amplitudes).norm(), 1e-15);
}

TEST(Circuit, BadReferencesAreIndexErrors) {
  AnsatzCircuit c{2, 1, {}};
  Gate g;
  g.kind = GateKind::RY;
  g.qubits = {2};
  g.param = 0;
  c.gates.push_back(g);
  try {
    apply_circuit(c, RealVector::Zero(1), QuantumState::basis("00"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IndexError);
  }
  c.gates[0].qubits = {0};
  c.gates[0].param = 3;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Circuit, GatesPreserveNormProperty) {
  Rng rng(2);
  for (int trial = 0; trial < 1000; ++trial) {
    const int q = 1 + trial % 4;
    const AnsatzCircuit c = random_circuit(q, 2, 1, rng);
    const QuantumState out = apply_circuit(c, random_params(2, rng), random_state(q, rng));
    ASSERT_NEAR(out.amplitudes.norm(), 1.0, 1e-12);
  }
}

TEST(Circuit, PauliRotationPeriodProperty) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const int q = 1 + trial % 4;
    AnsatzCircuit c{q, 1, {}};
    Gate g;
    g.kind = GateKind::PAULI_ROT;
    g.pauli = random_pauli(q, rng);
    g.param = 0;
    c.gates.push_back(g);
    const QuantumState psi = random_state(q, rng);
    const RealVector t = random_params(1, rng);
    const RealVector t2 = (t.array() + 2.0 * M_PI).matrix();
    const ComplexVector a = apply_circuit(c, t, psi).amplitudes, b = apply_circuit(c, t2, psi).amplitudes;
    ASSERT_LE((a + b).norm(), 1e-12);
  }
}

TEST(InnerProducts, BasicIdentities) {
  EXPECT_EQ(overlap(QuantumState::basis("01"), QuantumState::basis("01")), cplx(1.0));
  EXPECT_EQ(overlap(QuantumState::basis("01"), QuantumState::basis("10")), cplx(0.0));
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const int q = 1 + trial % 5;
    const PauliHamiltonian h = random_hamiltonian(q, 5, rng);
    const QuantumState a = random_state(q, rng), b = random_state(q, rng);
    EXPECT_NEAR(std::abs(overlap(a, a) - 1.0), 0.0, 1e-12);
    EXPECT_LE(std::abs(transition(a, h, b) - std::conj(transition(b, h, a))), 1e-12);
    EXPECT_NEAR(expectation(h, a), transition(a, h, a).real(), 1e-12);
  }
  try {
    overlap(QuantumState::basis("0"), QuantumState::basis("00"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(Objective, ZeroParamsUseDiagonalEntries) {
  const PauliHamiltonian h = load_hamiltonian(kData + "/h2_sto3g_4q.json");
  const std::vector<AnsatzCircuit> ansatz = load_ansatz(kData + "/h2_uccsd_ansatz.json");
  const std::vector<std::string> init = {"1010", "0110", "1001"};
  const HermitianOperator dense = hamiltonian_matrix(h);
  // Orthonormal basis states: qOMM reduces to the trace of the diagonal block.
  double diag = 0.0;
  for (const auto& s : init) {
    Eigen::Index idx = 0;
    for (std::size_t k = 0; k < s.size(); ++k)
      if (s[k] == '1') idx |= Eigen::Index{1} << k;
    diag += dense.matrix()(idx, idx).real();
  }
  ModelConfig cfg;
  EXPECT_NEAR(vqe_objective(cfg, h, ansatz, init, RealVector::Zero(total_params(ansatz, 3))), diag, 1e-12);
  // numpy diagonal of the dense H at indices 5, 6, 9.
  EXPECT_NEAR(diag, -1.8369679912029833 - 2.0 * 1.063653350029096, 1e-12);

  cfg.model = Model::QTPM;
  cfg.mu = 3.0;
  const std::vector<std::string> one = {"1010"};
  EXPECT_NEAR(vqe_objective(cfg, h, ansatz, one, RealVector::Zero(3)), 0.5 * -1.8369679912029833 + 0.75, 1e-12);
}

TEST(Objective, BackendConsistencyProperty) {
  Rng rng(5);
  const Model models[] = {Model::QOMM, Model::QTPM, Model::QL1M, Model::WEIGHTED_QL1M};
  for (int trial = 0; trial < 100; ++trial) {
    const int q = 2 + trial % 5;
    const int p = 1 + trial % 4;
    const PauliHamiltonian h = random_hamiltonian(q, 8, rng);
    std::vector<AnsatzCircuit> circuits;
    const bool shared = trial % 2 == 0;
    for (int i = 0; i < (shared ? 1 : p); ++i) circuits.push_back(random_circuit(q, 3, 10, rng));
    std::vector<std::string> init;
    for (int i = 0; i < p; ++i) {
      std::string s;
      for (int k = 0; k < q; ++k) s += rng() % 2 ? '1' : '0';
      init.push_back(s);
    }
    const RealVector params = random_params(total_params(circuits, init.size()), rng);
    const std::vector<QuantumState> states = prepare_states(circuits, init, params);
    ComplexMatrix x(Eigen::Index{1} << q, p);
    for (int i = 0; i < p; ++i) x.col(i) = states[static_cast<std::size_t>(i)].amplitudes;
    const HermitianOperator a = hamiltonian_matrix(h);
    for (const Model m : models) {
      ModelConfig cfg;
      cfg.model = m;
      cfg.mu = 2.5;
      cfg.mu1 = 7.0;
      if (m == Model::WEIGHTED_QL1M) {
        cfg.weights.resize(p);
        for (int i = 0; i < p; ++i) cfg.weights(i) = p - i;
      }
      ASSERT_NEAR(vqe_objective(cfg, h, circuits, init, params), model_value(cfg, a, x), 1e-10)
          << "trial " << trial << " model " << to_string(m);
    }
  }
}

TEST(Resources, TableFormulas) {
  const ResourceReport omm = resource_count(Model::QOMM, 3, 5);
  EXPECT_EQ(omm.hamiltonian_circuits, 45u);
  EXPECT_EQ(omm.regularization_circuits, 6u);
  const ResourceReport tpm = resource_count(Model::QTPM, 3, 5);
  EXPECT_EQ(tpm.hamiltonian_circuits, 15u);
  EXPECT_EQ(tpm.regularization_circuits, 3u);
  for (const Model m : {Model::QOMM, Model::QTPM, Model::QL1M})
    EXPECT_EQ(resource_count(m, 1, 7).regularization_circuits, 0u);
}

TEST(Resources, ClosedFormProperty) {
  for (std::uint64_t p = 1; p <= 10; ++p) {
    for (std::uint64_t n = 1; n <= 100; ++n) {
      const ResourceReport o = resource_count(Model::QOMM, p, n);
      ASSERT_EQ(o.hamiltonian_circuits, p * p * n);
      ASSERT_EQ(o.regularization_circuits, p * (p - 1));
      for (const Model m : {Model::QTPM, Model::QL1M}) {
        const ResourceReport r = resource_count(m, p, n);
        ASSERT_EQ(r.hamiltonian_circuits, p * n);
        ASSERT_EQ(r.regularization_circuits, p * (p - 1) / 2);
      }
    }
  }
}

TEST(RayleighRitz, RecoversLowestEigenpairs) {
  Rng rng(6);
  const PauliHamiltonian h = random_hamiltonian(4, 12, rng);
  const EigenDecomposition e = eigh(hamiltonian_matrix(h));
  std::vector<QuantumState> exact;
  for (int i = 0; i < 3; ++i) exact.push_back(QuantumState::from_vector(e.vectors.col(i)));
  const RitzResult r0 = rayleigh_ritz(exact, h);
  EXPECT_LE((r0.values - e.values.head(3)).cwiseAbs().maxCoeff(), 1e-10);

  const ComplexMatrix mix = random_gaussian(3, 3, rng) + 3.0 * ComplexMatrix::Identity(3, 3);
  std::vector<QuantumState> mixed;
  for (int i = 0; i < 3; ++i) mixed.push_back(QuantumState::from_vector(e.vectors.leftCols(3) * mix.col(i)));
  const RitzResult r1 = rayleigh_ritz(mixed, h);
  EXPECT_LE((r1.values - e.values.head(3)).cwiseAbs().maxCoeff(), 1e-8);
  const ComplexMatrix v = ritz_vectors(mixed, r1.r);
  const ComplexMatrix hv = hamiltonian_matrix(h).matrix() * v;
  for (int i = 0; i < 3; ++i) EXPECT_LE((hv.col(i) - r1.values(i) * v.col(i)).norm(), 1e-8 * v.col(i).norm());

  ComplexVector a = random_gaussian(16, 1, rng).col(0);
  ComplexVector b = a + 1e-14 * random_gaussian(16, 1, rng).col(0);
  try {
    rayleigh_ritz({QuantumState::from_vector(a), QuantumState::from_vector(b)}, h);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::IllConditionedMetric);
  }
}
