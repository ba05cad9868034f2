#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "taskxfer/aggregate.hpp"
#include "taskxfer/model.hpp"

namespace taskxfer {

/// Donor / Pirate describe a task as a finetuning source (transferability),
/// Sponge / Sieve as a target (malleability). Donor and Sponge use the
/// positive part, Pirate and Sieve the magnitude of the negative part.
enum class Persona { Donor, Pirate, Sponge, Sieve };

std::string_view to_string(Persona persona);

struct SeedScores {
    std::int64_t seed = 0;
    std::vector<TransferScore> transfer;         // one per task, TaskSet order
    std::vector<MalleabilityScore> malleability; // one per task, TaskSet order
};

struct ModelScores {
    std::string model_id;
    std::vector<SeedScores> seeds;
};

struct PersonaReport {
    std::string task_id;
    Persona persona = Persona::Donor;
    std::vector<std::string> models_satisfied;
    bool consistent = false;  // satisfied in every model present
    std::map<std::string, double> p_values;  // NaN when the test is undefined
    bool significant = false;                // p < alpha in every model
    bool single_model = false;
};

struct PersonaResult {
    std::vector<PersonaReport> reports;  // task-major, then Donor, Pirate, Sponge, Sieve
    std::vector<Diagnostic> warnings;
};

/// Scores each task against every persona in every model. A task satisfies
/// a persona in a model when its seed-mean magnitude strictly exceeds the
/// seed-mean model average; it earns the label (consistent) when that holds
/// in all models. Significance per model is a one-sided Welch test of the
/// task's per-seed scores against the pooled per-seed scores of all other
/// tasks. Throws MissingModel, DimensionMismatch or EmptyInput.
PersonaResult classify_personas(std::span<const ModelScores> models, const AnalysisConfig& config);

/// Reports with consistent == true.
std::vector<PersonaReport> assigned_personas(const PersonaResult& result);

}  // namespace taskxfer
