#include <doctest.h>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "support/fixtures.hpp"
#include "thermnet/assembly.hpp"
#include "thermnet/circuit.hpp"
#include "thermnet/simulate.hpp"

using namespace thermnet;
using namespace thermnet::testing;

TEST_SUITE_BEGIN("circuit");

TEST_CASE("validate accepts the TC1 fixture") {
    CHECK(validate(fixture_tc1()).ok());
    CHECK(validate(fixture_tc2()).ok());
    CHECK(validate(fixture_tc3()).ok());
}

TEST_CASE("validate reports dimension mismatches") {
    ThermalCircuit tc = fixture_tc1();
    tc.conductances = Vector::Ones(3);  // 2 branches, 3 conductances
    const ValidationReport report = validate(tc);
    REQUIRE_FALSE(report.ok());
    CHECK(report.violations[0].kind == ViolationKind::DimensionMismatch);
}

TEST_CASE("validate reports non-positive conductances") {
    ThermalCircuit tc = fixture_tc1();
    tc.conductances[1] = -1.0;
    const ValidationReport report = validate(tc);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].kind == ViolationKind::ConductanceNotPositive);
    CHECK(report.violations[0].index == 1);
}

TEST_CASE("validate reports malformed incidence rows") {
    ThermalCircuit tc = ThermalCircuit::with_shape(3, 3);
    tc.incidence.row(0) << 1, 1, 0;   // two entries of the same sign
    tc.incidence.row(1) << 1, -1, 1;  // three nonzeros
    tc.incidence.row(2) << 0, 0, 0;   // empty row
    const ValidationReport report = validate(tc);
    REQUIRE(report.violations.size() == 3);
    CHECK(report.violations[0].kind == ViolationKind::IncidenceRowDegree);
    CHECK(report.violations[0].index == 1);
    CHECK(report.violations[1].kind == ViolationKind::IncidenceRowDegree);
    CHECK(report.violations[1].index == 2);
    CHECK(report.violations[2].kind == ViolationKind::IncidenceRowSigns);
    CHECK(report.violations[2].index == 0);
}

TEST_CASE("validate rejects out-of-range incidence entries and flags") {
    ThermalCircuit tc = single_rc();
    tc.incidence(0, 0) = 2;
    tc.flow_source_flags[0] = 3;
    const ValidationReport report = validate(tc);
    // The out-of-range entry does not count as a valid endpoint, so the row
    // degenerates too.
    REQUIRE(report.violations.size() == 3);
    CHECK(report.violations[0].kind == ViolationKind::IncidenceEntryRange);
    CHECK(report.violations[1].kind == ViolationKind::IncidenceRowDegree);
    CHECK(report.violations[2].kind == ViolationKind::FlagNotBinary);
}

TEST_CASE("validate reports negative capacities") {
    ThermalCircuit tc = single_rc();
    tc.capacities[0] = -5.0;
    const ValidationReport report = validate(tc);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].kind == ViolationKind::CapacityNegative);
}

TEST_CASE("validate is idempotent and deterministic") {
    ThermalCircuit tc = fixture_tc1();
    tc.conductances[0] = -2.0;
    tc.capacities[1] = -1.0;
    const ValidationReport first = validate(tc);
    const ValidationReport second = validate(tc);
    REQUIRE(first.violations.size() == second.violations.size());
    for (std::size_t i = 0; i < first.violations.size(); ++i) {
        CHECK(first.violations[i].kind == second.violations[i].kind);
        CHECK(first.violations[i].index == second.violations[i].index);
        CHECK(first.violations[i].message == second.violations[i].message);
    }
}

TEST_CASE("check_well_posed accepts the assembled fixture") {
    const auto circuits = fixture_circuits();
    const ThermalCircuit assembled = assemble(circuits, fixture_connections());
    CHECK(check_well_posed(assembled).ok());
}

TEST_CASE("check_well_posed classifies isolated nodes by capacity") {
    ThermalCircuit tc = ThermalCircuit::with_shape(0, 1);

    SUBCASE("capacitive isolated node is a warning") {
        tc.capacities[0] = 10.0;
        const ValidationReport report = check_well_posed(tc);
        REQUIRE(report.violations.size() == 1);
        CHECK(report.violations[0].kind == ViolationKind::UnreachableNode);
        CHECK(report.violations[0].severity == Severity::Warning);
        CHECK_FALSE(report.has_errors());
    }
    SUBCASE("massless isolated node is an error") {
        const ValidationReport report = check_well_posed(tc);
        REQUIRE(report.violations.size() == 1);
        CHECK(report.violations[0].kind == ViolationKind::FloatingMasslessNode);
        CHECK(report.has_errors());
    }
}

TEST_CASE("check_well_posed flags unanchored massless pairs") {
    // Two massless nodes joined by one branch, no reference branch:
    // A^T G A = g [[1, -1], [-1, 1]] is rank 1.
    ThermalCircuit tc = ThermalCircuit::with_shape(1, 2);
    tc.incidence << -1, 1;
    const ValidationReport report = check_well_posed(tc);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].kind == ViolationKind::UnanchoredMasslessComponent);
    CHECK(report.has_errors());

    SUBCASE("the same pair with capacity is only a steady-state warning") {
        tc.capacities[0] = 100.0;
        const ValidationReport warned = check_well_posed(tc);
        REQUIRE(warned.violations.size() == 1);
        CHECK(warned.violations[0].kind == ViolationKind::NoReferenceComponent);
        CHECK_FALSE(warned.has_errors());
    }
}

TEST_CASE("build_kkt lays out the blocks of TC2") {
    const ThermalCircuit tc = fixture_tc2(4.0);
    const KktSystem sys = build_kkt(tc);
    REQUIRE(sys.matrix.rows() == 3);
    CHECK(sys.conductance_inverse_block()(0, 0) == doctest::Approx(0.25));
    CHECK(sys.incidence_block()(0, 0) == -1.0);
    CHECK(sys.incidence_block()(0, 1) == 1.0);
    CHECK(sys.neg_incidence_transpose_block()(0, 0) == 1.0);
    CHECK(sys.neg_incidence_transpose_block()(1, 0) == -1.0);
    CHECK(sys.capacity_block()(1, 1) == 15.0);
}

TEST_CASE("build_kkt on the smallest circuit") {
    ThermalCircuit tc = single_rc(4.0, 0.0);
    tc.capacities[0] = 0.0;
    const KktSystem sys = build_kkt(tc);
    REQUIRE(sys.matrix.rows() == 2);
    CHECK(sys.matrix(0, 0) == doctest::Approx(0.25));
    CHECK(sys.matrix(0, 1) == 1.0);
    CHECK(sys.matrix(1, 0) == -1.0);
    CHECK(sys.matrix(1, 1) == 0.0);
}

TEST_CASE("build_kkt of the assembled fixture matches the block construction") {
    const ThermalCircuit assembled = assemble(fixture_circuits(), fixture_connections());
    const KktSystem sys = build_kkt(assembled);
    REQUIRE(sys.branches == 5);
    REQUIRE(sys.nodes == 3);
    const Matrix a = assembled.incidence.cast<double>();
    CHECK((sys.incidence_block() - a).cwiseAbs().maxCoeff() == 0.0);
    CHECK((sys.neg_incidence_transpose_block() + a.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((sys.conductance_inverse_block().diagonal() -
           assembled.conductances.cwiseInverse())
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK((sys.capacity_block().diagonal() - assembled.capacities).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("build_dae on one reference branch") {
    const ThermalCircuit tc = single_rc(3.0, 10.0);
    const DaeSystem dae = build_dae(tc);
    CHECK(dae.conduction(0, 0) == doctest::Approx(-3.0));
    CHECK(dae.source_coupling(0, 0) == doctest::Approx(3.0));
}

TEST_CASE("build_dae of the assembled fixture") {
    const double g11 = 5.0, g12 = 2.5, g21 = 4.0, g31 = 3.0, g32 = 1.5;
    const ThermalCircuit assembled = assemble(fixture_circuits(), fixture_connections());
    const DaeSystem dae = build_dae(assembled);
    CHECK(dae.conduction(0, 0) == doctest::Approx(-(g11 + g12)));
    CHECK(dae.conduction(2, 2) == doctest::Approx(-(g21 + g31 + g32)));
    CHECK(dae.conduction(0, 1) == doctest::Approx(g12));
    CHECK(dae.conduction(1, 2) == doctest::Approx(g21));
    CHECK(dae.conduction(0, 2) == doctest::Approx(0.0));
}

TEST_CASE("build_dae of the series two-branch wall") {
    const double g1 = 2.0, g2 = 3.0;
    const ThermalCircuit tc = chain_circuit(g1, g2, 100.0);
    const DaeSystem dae = build_dae(tc);
    Matrix expected(2, 2);
    expected << -(g1 + g2), g2, g2, -g2;
    CHECK((dae.conduction - expected).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("conduction matrix is symmetric negative semidefinite on random circuits") {
    std::mt19937 rng(20240501);
    for (int trial = 0; trial < 40; ++trial) {
        const ThermalCircuit tc = random_circuit(rng);
        REQUIRE(validate(tc).ok());
        const DaeSystem dae = build_dae(tc);
        const double scale = dae.conduction.cwiseAbs().maxCoeff();
        CHECK((dae.conduction - dae.conduction.transpose()).cwiseAbs().maxCoeff() <=
              1e-10 * scale);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(dae.conduction);
        CHECK(eig.eigenvalues().maxCoeff() <= 1e-10 * scale);
    }
}

TEST_CASE("conduction matrix is negative definite on reference-anchored circuits") {
    std::mt19937 rng(20240502);
    for (int trial = 0; trial < 40; ++trial) {
        const ThermalCircuit tc = random_circuit(rng);
        // The generator anchors every component to the reference, so the
        // negated conduction matrix must admit a Cholesky factorization.
        const DaeSystem dae = build_dae(tc);
        Eigen::LLT<Matrix> llt(Matrix(-dae.conduction));
        CHECK(llt.info() == Eigen::Success);
    }
}

TEST_CASE("heat rates balance at steady state") {
    std::mt19937 rng(20240503);
    std::uniform_real_distribution<double> temp(-20.0, 20.0);
    std::uniform_real_distribution<double> flow(-100.0, 100.0);
    for (int trial = 0; trial < 40; ++trial) {
        const ThermalCircuit tc = random_circuit(rng);
        const DaeSystem dae = build_dae(tc);

        SourceValues sources;
        sources.branch_temps = Vector::Zero(tc.temp_source_flags.sum());
        sources.node_flows = Vector::Zero(tc.flow_source_flags.sum());
        for (Index i = 0; i < sources.branch_temps.size(); ++i)
            sources.branch_temps[i] = temp(rng);
        for (Index j = 0; j < sources.node_flows.size(); ++j) sources.node_flows[j] = flow(rng);

        const Vector theta = steady_state(dae, sources);
        const Matrix a = tc.incidence.cast<double>();
        const Vector b_full = expand_branch_temps(tc.temp_source_flags, sources.branch_temps);
        const Vector f_full = expand_node_flows(tc.flow_source_flags, sources.node_flows);
        const Vector q = tc.conductances.asDiagonal() * (-a * theta + b_full);
        const Vector residual = a.transpose() * q + f_full;
        const double scale = std::max(1.0, (a.transpose() * q).cwiseAbs().maxCoeff());
        CHECK(residual.cwiseAbs().maxCoeff() <= 1e-10 * scale);
    }
}

TEST_SUITE_END();
