#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "taskxfer/graph.hpp"
#include "taskxfer/matrix.hpp"
#include "taskxfer/model.hpp"
#include "taskxfer/personas.hpp"

namespace taskxfer {

struct PlantedClique {
    std::vector<std::string> members;
    EdgeSign sign = EdgeSign::Positive;
};

struct PlantedPersona {
    std::string task_id;
    Persona persona = Persona::Donor;
};

/// Ground truth for a synthetic evaluation dataset.
struct PlantedStructure {
    TaskSet task_set;
    std::vector<double> baseline;  // percent, per target
    std::vector<double> ceiling;   // percent, per target
    Matrix effects;                // planted PGF mu*(i, j)
    std::vector<PlantedClique> planted_cliques;
    std::vector<PlantedPersona> planted_personas;
    double noise_std = 0.0;        // percent
    std::vector<int> questions;    // m_j, 0 disables quantization
    std::vector<std::int64_t> seeds{0, 1, 2, 3};
    std::vector<std::string> model_ids{"synthetic"};
    std::uint64_t rng_seed = 0;
};

/// Returns every inconsistency found (empty when valid): shape errors,
/// baseline >= ceiling, planted cliques whose internal effects have the
/// wrong sign, planted personas that the effects do not produce.
std::vector<std::string> structure_problems(const PlantedStructure& structure);

struct SaturatedCell {
    std::string model_id;
    std::int64_t seed = 0;
    std::size_t source = 0;  // task index
    std::size_t target = 0;
};

struct SynthOutput {
    std::vector<EvalRecord> records;
    std::vector<SaturatedCell> saturated;  // clamped to 0 or 100 before quantization
};

/// Materializes accuracy records:
///
///     acc(i, j) = baseline_j + mu*(i, j) * (ceiling_j - baseline_j) + noise
///
/// clamped to [0, 100] and snapped to the 100/m_j grid. Baseline rows carry
/// no noise. Each noise draw is a pure function of (rng_seed, model, seed,
/// source, target), so output does not depend on generation order. Throws
/// InconsistentStructure.
SynthOutput generate(const PlantedStructure& structure);

/// Ceiling spec that reproduces the planted per-task ceilings during analysis.
CeilingSpec planted_ceiling(const PlantedStructure& structure);

struct PlantedDesign {
    std::vector<std::string> model_ids{"synthetic-small", "synthetic-base", "synthetic-large"};
    std::vector<std::int64_t> seeds{0, 1, 2, 3};
    double noise_std = 0.0;
    int questions = 0;
    std::uint64_t rng_seed = 20250101;
    double background = 0.03;  // |background effect| bound
};

/// 13-task BLINK layout with a positive clique {AS, JG, VS}, a negative
/// clique {MR, OL, SC}, and one task per persona (Donor CN, Pirate FD,
/// Sponge RD, Sieve SR). Remaining cells get small deterministic
/// background effects.
PlantedStructure default_planted_structure(const PlantedDesign& design = {});

struct FeatureRecovery {
    std::string feature;  // "clique+ AS,JG,VS" or "Donor CN"
    bool recovered = false;
};

struct RecoveryReport {
    std::vector<FeatureRecovery> features;
    double recall = 1.0;
    double precision = 1.0;
    std::size_t reported = 0;  // analysis outputs considered for precision
};

/// Scores analysis output against the planted truth. A planted clique is
/// recovered when some reported maximal clique of the same sign contains
/// it; a planted persona when the task carries that label. Precision counts
/// reported significant cliques and assigned personas that match a planted
/// feature.
RecoveryReport recovery_report(const PlantedStructure& structure, const std::vector<Clique>& cliques,
                               const std::vector<PersonaReport>& personas);

}  // namespace taskxfer
