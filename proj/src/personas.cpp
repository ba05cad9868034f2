#include "taskxfer/personas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "taskxfer/error.hpp"
#include "taskxfer/stats.hpp"

namespace taskxfer {

std::string_view to_string(Persona persona) {
    switch (persona) {
        case Persona::Donor: return "Donor";
        case Persona::Pirate: return "Pirate";
        case Persona::Sponge: return "Sponge";
        case Persona::Sieve: return "Sieve";
    }
    return "Donor";
}

namespace {

constexpr Persona kPersonas[] = {Persona::Donor, Persona::Pirate, Persona::Sponge, Persona::Sieve};

// Signed score the persona looks at.
double signed_score(const SeedScores& seed, std::size_t task, Persona persona) {
    switch (persona) {
        case Persona::Donor: return seed.transfer[task].positive;
        case Persona::Pirate: return seed.transfer[task].negative;
        case Persona::Sponge: return seed.malleability[task].positive;
        case Persona::Sieve: return seed.malleability[task].negative;
    }
    return 0.0;
}

bool is_negative_persona(Persona persona) { return persona == Persona::Pirate || persona == Persona::Sieve; }

struct ModelVerdict {
    bool satisfied = false;
    double p_value = std::numeric_limits<double>::quiet_NaN();
};

ModelVerdict judge(const ModelScores& model, std::size_t task, std::size_t task_count, Persona persona,
                   const AnalysisConfig& config) {
    const double seeds = static_cast<double>(model.seeds.size());
    double task_magnitude = 0.0;
    double average_magnitude = 0.0;
    std::vector<double> candidate;
    std::vector<double> others;
    for (const auto& seed : model.seeds) {
        double seed_sum = 0.0;
        std::size_t seed_count = 0;
        for (std::size_t t = 0; t < task_count; ++t) {
            const double value = signed_score(seed, t, persona);
            if (t == task) {
                candidate.push_back(value);
            } else {
                others.push_back(value);
            }
            if (t == task && config.exclude_self_from_average) continue;
            seed_sum += std::abs(value);
            ++seed_count;
        }
        task_magnitude += std::abs(signed_score(seed, task, persona)) / seeds;
        average_magnitude += seed_sum / static_cast<double>(seed_count) / seeds;
    }

    ModelVerdict verdict;
    // differences at rounding level are ties, so identical scores never qualify
    const double scale = std::max(task_magnitude, average_magnitude);
    verdict.satisfied = task_magnitude - average_magnitude > 1e-12 * scale;
    const Sidedness side = is_negative_persona(persona) ? Sidedness::OneSidedLess : Sidedness::OneSidedGreater;
    try {
        verdict.p_value = unpaired_t_test(candidate, others, TTestVariant::Welch, side).p_value;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::InsufficientSamples && e.code() != ErrorCode::ZeroVarianceBoth) throw;
    }
    return verdict;
}

}  // namespace

PersonaResult classify_personas(std::span<const ModelScores> models, const AnalysisConfig& config) {
    if (models.empty()) throw Error(ErrorCode::MissingModel, "no models to classify");

    std::size_t task_count = 0;
    std::vector<std::string> task_ids;
    for (const auto& model : models) {
        if (model.seeds.empty()) throw Error(ErrorCode::EmptyInput, "model '" + model.model_id + "' has no seeds");
        for (const auto& seed : model.seeds) {
            if (task_ids.empty()) {
                task_count = seed.transfer.size();
                for (const auto& s : seed.transfer) task_ids.push_back(s.task_id);
            }
            if (seed.transfer.size() != task_count || seed.malleability.size() != task_count)
                throw Error(ErrorCode::DimensionMismatch, "score tables differ in task count");
            for (std::size_t t = 0; t < task_count; ++t)
                if (seed.transfer[t].task_id != task_ids[t] || seed.malleability[t].task_id != task_ids[t])
                    throw Error(ErrorCode::DimensionMismatch, "score tables differ in task order");
        }
    }
    if (task_count < 2) throw Error(ErrorCode::EmptyInput, "at least two tasks are required");

    PersonaResult result;
    std::set<std::size_t> seed_counts;
    for (const auto& model : models) seed_counts.insert(model.seeds.size());
    if (seed_counts.size() > 1)
        result.warnings.push_back({"SeedMismatch: models were evaluated with different numbers of seeds"});

    for (std::size_t task = 0; task < task_count; ++task) {
        for (Persona persona : kPersonas) {
            PersonaReport report;
            report.task_id = task_ids[task];
            report.persona = persona;
            report.single_model = models.size() == 1;
            bool all_significant = true;
            for (const auto& model : models) {
                const ModelVerdict verdict = judge(model, task, task_count, persona, config);
                if (verdict.satisfied) report.models_satisfied.push_back(model.model_id);
                report.p_values[model.model_id] = verdict.p_value;
                if (!(verdict.p_value < config.alpha)) all_significant = false;
            }
            report.consistent = report.models_satisfied.size() == models.size();
            report.significant = all_significant;
            result.reports.push_back(std::move(report));
        }
    }
    return result;
}

std::vector<PersonaReport> assigned_personas(const PersonaResult& result) {
    std::vector<PersonaReport> out;
    for (const auto& r : result.reports)
        if (r.consistent) out.push_back(r);
    return out;
}

}  // namespace taskxfer
