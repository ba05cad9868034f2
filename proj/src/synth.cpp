#include "taskxfer/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "taskxfer/aggregate.hpp"
#include "taskxfer/error.hpp"

namespace taskxfer {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-based standard normal draw keyed by the cell coordinates.
double cell_noise(std::uint64_t rng_seed, std::uint64_t model, std::uint64_t seed, std::uint64_t source,
                  std::uint64_t target) {
    std::uint64_t h = splitmix64(rng_seed);
    for (std::uint64_t part : {model, seed, source, target}) h = splitmix64(h ^ part);
    const double u1 = (static_cast<double>(splitmix64(h) >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = static_cast<double>(splitmix64(h + 1) >> 11) * 0x1.0p-53;      // [0, 1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double uniform_pm(std::uint64_t key, double bound) {
    const double u = static_cast<double>(splitmix64(key) >> 11) * 0x1.0p-53;
    return (2.0 * u - 1.0) * bound;
}

double quantize(double accuracy, int questions) {
    if (questions <= 0) return accuracy;
    const double correct = std::round(accuracy * questions / 100.0);
    return correct * 100.0 / questions;
}

bool has_sign(double v, EdgeSign sign) { return sign == EdgeSign::Positive ? v > 0.0 : v < 0.0; }

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (std::size_t k = 0; k < parts.size(); ++k) out += (k ? "," : "") + parts[k];
    return out;
}

}  // namespace

std::vector<std::string> structure_problems(const PlantedStructure& s) {
    std::vector<std::string> problems;
    const std::size_t n = s.task_set.size();
    if (n < 2) problems.push_back("task set needs at least two tasks");
    if (s.baseline.size() != n) problems.push_back("baseline length does not match the task set");
    if (s.ceiling.size() != n) problems.push_back("ceiling length does not match the task set");
    if (s.questions.size() != n) problems.push_back("questions length does not match the task set");
    if (s.effects.rows() != n || s.effects.cols() != n) problems.push_back("effects matrix is not N x N");
    if (!(s.noise_std >= 0.0)) problems.push_back("noise_std must be non-negative");
    if (s.seeds.empty()) problems.push_back("at least one seed is required");
    if (s.model_ids.empty()) problems.push_back("at least one model id is required");
    if (std::set(s.seeds.begin(), s.seeds.end()).size() != s.seeds.size()) problems.push_back("duplicate seeds");
    if (std::set(s.model_ids.begin(), s.model_ids.end()).size() != s.model_ids.size())
        problems.push_back("duplicate model ids");
    if (!problems.empty()) return problems;

    for (std::size_t j = 0; j < n; ++j) {
        if (!(s.baseline[j] >= 0.0 && s.ceiling[j] <= 100.0 && s.baseline[j] < s.ceiling[j]))
            problems.push_back("task " + s.task_set[j].id + ": need 0 <= baseline < ceiling <= 100");
        if (s.questions[j] < 0) problems.push_back("task " + s.task_set[j].id + ": negative question count");
    }

    for (const auto& clique : s.planted_cliques) {
        std::vector<std::size_t> idx;
        for (const auto& id : clique.members) {
            if (auto i = s.task_set.find(id)) {
                idx.push_back(*i);
            } else {
                problems.push_back("planted clique references unknown task " + id);
            }
        }
        if (clique.members.size() < 2) problems.push_back("planted clique needs at least two members");
        for (std::size_t a : idx)
            for (std::size_t b : idx)
                if (a != b && !has_sign(s.effects(a, b), clique.sign))
                    problems.push_back("planted clique " + join(clique.members) + ": effect " + s.task_set[a].id +
                                       "->" + s.task_set[b].id + " has the wrong sign");
    }

    if (!s.planted_personas.empty() && problems.empty()) {
        AnalysisConfig config;
        const auto transfer = all_transferability(s.effects, s.task_set, config);
        const auto malleability = all_malleability(s.effects, s.task_set, config);
        const ScoreAverage t_avg = model_average(std::span<const TransferScore>(transfer));
        const ScoreAverage m_avg = model_average(std::span<const MalleabilityScore>(malleability));
        for (const auto& p : s.planted_personas) {
            auto i = s.task_set.find(p.task_id);
            if (!i) {
                problems.push_back("planted persona references unknown task " + p.task_id);
                continue;
            }
            bool ok = false;
            switch (p.persona) {
                case Persona::Donor: ok = transfer[*i].positive > t_avg.positive; break;
                case Persona::Pirate: ok = std::abs(transfer[*i].negative) > std::abs(t_avg.negative); break;
                case Persona::Sponge: ok = malleability[*i].positive > m_avg.positive; break;
                case Persona::Sieve: ok = std::abs(malleability[*i].negative) > std::abs(m_avg.negative); break;
            }
            if (!ok)
                problems.push_back("planted " + std::string(to_string(p.persona)) + " " + p.task_id +
                                   " is not above the model average under the planted effects");
        }
    }
    return problems;
}

SynthOutput generate(const PlantedStructure& s) {
    if (auto problems = structure_problems(s); !problems.empty())
        throw Error(ErrorCode::InconsistentStructure, problems.front(), problems);

    const std::size_t n = s.task_set.size();
    SynthOutput out;
    out.records.reserve(s.model_ids.size() * s.seeds.size() * (n + 1) * n);
    for (std::size_t mi = 0; mi < s.model_ids.size(); ++mi) {
        for (std::size_t si = 0; si < s.seeds.size(); ++si) {
            for (std::size_t j = 0; j < n; ++j) {
                EvalRecord base;
                base.model_id = s.model_ids[mi];
                base.seed = s.seeds[si];
                base.target = s.task_set[j].id;
                base.num_questions = s.questions[j];
                base.accuracy = quantize(s.baseline[j], s.questions[j]);
                out.records.push_back(base);
            }
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    double acc = s.baseline[j] + s.effects(i, j) * (s.ceiling[j] - s.baseline[j]);
                    if (s.noise_std > 0.0)
                        acc += s.noise_std * cell_noise(s.rng_seed, mi, static_cast<std::uint64_t>(s.seeds[si]), i, j);
                    if (acc < 0.0 || acc > 100.0) out.saturated.push_back({s.model_ids[mi], s.seeds[si], i, j});
                    acc = quantize(std::clamp(acc, 0.0, 100.0), s.questions[j]);

                    EvalRecord r;
                    r.model_id = s.model_ids[mi];
                    r.seed = s.seeds[si];
                    r.source = s.task_set[i].id;
                    r.target = s.task_set[j].id;
                    r.accuracy = acc;
                    r.num_questions = s.questions[j];
                    out.records.push_back(std::move(r));
                }
            }
        }
    }
    return out;
}

CeilingSpec planted_ceiling(const PlantedStructure& s) {
    CeilingSpec spec;
    spec.mode = CeilingMode::Fixed;
    spec.fixed_value = 100.0;
    for (std::size_t j = 0; j < s.task_set.size() && j < s.ceiling.size(); ++j)
        spec.per_task_override[s.task_set[j].id] = s.ceiling[j];
    return spec;
}

PlantedStructure default_planted_structure(const PlantedDesign& design) {
    PlantedStructure s;
    s.task_set = blink_task_set();
    const std::size_t n = s.task_set.size();
    s.model_ids = design.model_ids;
    s.seeds = design.seeds;
    s.noise_std = design.noise_std;
    s.rng_seed = design.rng_seed;
    s.questions.assign(n, design.questions);

    s.baseline.resize(n);
    s.ceiling.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        s.baseline[j] = 40.0 + 2.5 * static_cast<double>((j * 7) % 13);  // 40 .. 70
        s.ceiling[j] = j % 4 == 3 ? 95.0 : 100.0;
    }

    s.effects = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            s.effects(i, j) = i == j ? 0.6 : uniform_pm(design.rng_seed ^ (i * 131 + j * 7919 + 1), design.background);
        }
    }
    auto at = [&](const char* id) { return s.task_set.index_of(id); };

    const std::vector<std::pair<std::vector<std::string>, EdgeSign>> cliques = {
        {{"AS", "JG", "VS"}, EdgeSign::Positive},
        {{"MR", "OL", "SC"}, EdgeSign::Negative},
    };
    for (const auto& [members, sign] : cliques) {
        for (const auto& a : members)
            for (const auto& b : members)
                if (a != b) s.effects(at(a.c_str()), at(b.c_str())) = sign == EdgeSign::Positive ? 0.3 : -0.25;
        s.planted_cliques.push_back({members, sign});
    }

    // rows first, then columns; the shared cells take the column value
    for (std::size_t j = 0; j < n; ++j) {
        if (j != at("CN")) s.effects(at("CN"), j) = 0.35;
        if (j != at("FD")) s.effects(at("FD"), j) = -0.3;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (i != at("RD")) s.effects(i, at("RD")) = 0.35;
        if (i != at("SR")) s.effects(i, at("SR")) = -0.3;
    }
    s.planted_personas = {
        {"CN", Persona::Donor},
        {"FD", Persona::Pirate},
        {"RD", Persona::Sponge},
        {"SR", Persona::Sieve},
    };
    return s;
}

RecoveryReport recovery_report(const PlantedStructure& structure, const std::vector<Clique>& cliques,
                               const std::vector<PersonaReport>& personas) {
    RecoveryReport report;
    if (structure.planted_cliques.empty() && structure.planted_personas.empty()) return report;

    auto contains = [](const std::vector<std::string>& haystack, const std::vector<std::string>& needle) {
        return std::all_of(needle.begin(), needle.end(), [&](const std::string& id) {
            return std::find(haystack.begin(), haystack.end(), id) != haystack.end();
        });
    };

    std::size_t recovered = 0;
    for (const auto& planted : structure.planted_cliques) {
        FeatureRecovery f;
        f.feature = std::string(planted.sign == EdgeSign::Positive ? "clique+ " : "clique- ") + join(planted.members);
        f.recovered = std::any_of(cliques.begin(), cliques.end(), [&](const Clique& c) {
            return c.maximal && c.sign == planted.sign && contains(c.members, planted.members);
        });
        recovered += f.recovered ? 1 : 0;
        report.features.push_back(std::move(f));
    }
    for (const auto& planted : structure.planted_personas) {
        FeatureRecovery f;
        f.feature = std::string(to_string(planted.persona)) + " " + planted.task_id;
        f.recovered = std::any_of(personas.begin(), personas.end(), [&](const PersonaReport& p) {
            return p.consistent && p.persona == planted.persona && p.task_id == planted.task_id;
        });
        recovered += f.recovered ? 1 : 0;
        report.features.push_back(std::move(f));
    }
    report.recall = static_cast<double>(recovered) / static_cast<double>(report.features.size());

    std::size_t matched = 0;
    for (const auto& c : cliques) {
        if (!c.maximal || !c.significant) continue;
        ++report.reported;
        const bool match = std::any_of(structure.planted_cliques.begin(), structure.planted_cliques.end(),
                                       [&](const PlantedClique& p) { return p.sign == c.sign && contains(c.members, p.members); });
        matched += match ? 1 : 0;
    }
    for (const auto& p : personas) {
        if (!p.consistent) continue;
        ++report.reported;
        const bool match =
            std::any_of(structure.planted_personas.begin(), structure.planted_personas.end(),
                        [&](const PlantedPersona& q) { return q.persona == p.persona && q.task_id == p.task_id; });
        matched += match ? 1 : 0;
    }
    report.precision = report.reported == 0 ? 1.0 : static_cast<double>(matched) / static_cast<double>(report.reported);
    return report;
}

}  // namespace taskxfer
