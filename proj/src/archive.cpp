// Copyright 2026 The catbij Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "catbij/archive.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>

#include <fmt/format.h>

#include "catbij/serialize.hpp"

namespace catbij {

using json = nlohmann::json;

namespace {

const std::vector<std::string>& known_extractors() {
    static const std::vector<std::string> names{"source_length", "line_count",  "combined",    "final",
                                                "surjectivity",  "injectivity", "validity", "defined_fraction"};
    return names;
}

bool better(const Elite& a, const Elite& b) {
    if (a.score() != b.score()) return a.score() > b.score();
    return a.program.id < b.program.id;
}

}  // namespace

FeatureDescriptor FeatureDescriptor::standard() {
    FeatureDescriptor d;
    d.dimensions.push_back({"source_length", "source_length", {250, 500, 1000, 2000, 4000, 8000, 16000}});
    d.dimensions.push_back({"combined", "combined", {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}});
    return d;
}

void FeatureDescriptor::validate() const {
    if (dimensions.empty()) throw std::invalid_argument("feature descriptor has no dimensions");
    for (const auto& dim : dimensions) {
        const auto& names = known_extractors();
        if (std::find(names.begin(), names.end(), dim.extractor) == names.end())
            throw std::invalid_argument("unknown feature extractor: " + dim.extractor);
        for (std::size_t i = 1; i < dim.edges.size(); ++i) {
            if (!(dim.edges[i - 1] < dim.edges[i]))
                throw std::invalid_argument("bin edges must be strictly ascending in dimension " + dim.name);
        }
    }
}

double feature_value(const std::string& extractor, const CandidateProgram& candidate, const Evaluation& eval) {
    const auto& s = eval.empirical;
    if (extractor == "source_length") return static_cast<double>(candidate.source.size());
    if (extractor == "line_count")
        return static_cast<double>(std::count(candidate.source.begin(), candidate.source.end(), '\n') + 1);
    if (extractor == "combined") return s.combined.to_double();
    if (extractor == "final") return eval.final_score.to_double();
    if (extractor == "surjectivity") return s.surjectivity.to_double();
    if (extractor == "injectivity") return s.injectivity.to_double();
    if (extractor == "validity") return s.validity.to_double();
    if (extractor == "defined_fraction") return s.defined_fraction.to_double();
    throw std::invalid_argument("unknown feature extractor: " + extractor);
}

int bin_index(double value, const std::vector<double>& edges) {
    return static_cast<int>(std::upper_bound(edges.begin(), edges.end(), value) - edges.begin());
}

Coordinates compute_features(const CandidateProgram& candidate, const Evaluation& eval,
                             const FeatureDescriptor& descriptor) {
    Coordinates c;
    c.reserve(descriptor.dimensions.size());
    for (const auto& dim : descriptor.dimensions) c.push_back(bin_index(feature_value(dim.extractor, candidate, eval), dim.edges));
    return c;
}

std::string_view to_string(InsertOutcome o) {
    switch (o) {
        case InsertOutcome::new_cell: return "new_cell";
        case InsertOutcome::replaced: return "replaced";
        case InsertOutcome::rejected: return "rejected";
    }
    return "rejected";
}

InsertOutcome parse_insert_outcome(std::string_view s) {
    if (s == "new_cell") return InsertOutcome::new_cell;
    if (s == "replaced") return InsertOutcome::replaced;
    if (s == "rejected") return InsertOutcome::rejected;
    throw std::invalid_argument("unknown insert outcome: " + std::string(s));
}

Archive::Archive(int island, FeatureDescriptor descriptor) : island_(island), descriptor_(std::move(descriptor)) {
    descriptor_.validate();
}

InsertOutcome Archive::insert(const CandidateProgram& candidate, const Evaluation& eval) {
    HistoryEntry h{candidate.id, compute_features(candidate, eval, descriptor_), eval.final_score,
                   InsertOutcome::rejected, std::nullopt};
    auto it = cells_.find(h.coordinates);
    if (it == cells_.end()) {
        cells_.emplace(h.coordinates, Elite{candidate, eval});
        h.outcome = InsertOutcome::new_cell;
    } else if (eval.final_score > it->second.score()) {
        h.displaced_id = it->second.program.id;
        it->second = Elite{candidate, eval};
        h.outcome = InsertOutcome::replaced;
    }
    history_.push_back(h);
    return h.outcome;
}

const Elite& Archive::sample_parent(std::mt19937_64& rng) const {
    if (cells_.empty()) throw EmptyArchiveError(fmt::format("island {} archive is empty", island_));
    std::uniform_int_distribution<std::size_t> pick(0, cells_.size() - 1);
    return std::next(cells_.begin(), static_cast<std::ptrdiff_t>(pick(rng)))->second;
}

std::vector<const Elite*> Archive::sample_inspirations(int k, const std::string& exclude_id,
                                                       std::mt19937_64& rng) const {
    if (k <= 0) return {};
    std::vector<const Elite*> pool;
    for (const auto& [coords, elite] : cells_) {
        if (elite.program.id != exclude_id) pool.push_back(&elite);
    }
    std::sort(pool.begin(), pool.end(), [](const Elite* a, const Elite* b) { return better(*a, *b); });

    const auto n = static_cast<std::size_t>(k);
    const auto top = std::min(pool.size(), (n + 1) / 2);
    std::vector<const Elite*> out(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(top));
    const auto want = std::min(n, pool.size()) - top;
    std::sample(pool.begin() + static_cast<std::ptrdiff_t>(top), pool.end(), std::back_inserter(out), want, rng);
    return out;
}

const Elite* Archive::best() const {
    const Elite* b = nullptr;
    for (const auto& [coords, elite] : cells_) {
        if (!b || better(elite, *b)) b = &elite;
    }
    return b;
}

const Elite* Archive::find(const std::string& id) const {
    for (const auto& [coords, elite] : cells_) {
        if (elite.program.id == id) return &elite;
    }
    return nullptr;
}

json descriptor_to_json(const FeatureDescriptor& d) {
    json dims = json::array();
    for (const auto& dim : d.dimensions) dims.push_back({{"name", dim.name}, {"extractor", dim.extractor}, {"edges", dim.edges}});
    return {{"dimensions", dims}};
}

FeatureDescriptor descriptor_from_json(const json& j) {
    FeatureDescriptor d;
    for (const auto& dim : j.at("dimensions")) {
        d.dimensions.push_back({dim.at("name").get<std::string>(), dim.value("extractor", dim.at("name").get<std::string>()),
                                dim.at("edges").get<std::vector<double>>()});
    }
    d.validate();
    return d;
}

json Archive::to_json() const {
    json cells = json::array();
    for (const auto& [coords, elite] : cells_) {
        cells.push_back({{"coordinates", coords}, {"program", elite.program}, {"evaluation", elite.evaluation}});
    }
    json hist = json::array();
    for (const auto& h : history_) {
        json e = {{"candidate_id", h.candidate_id},
                  {"coordinates", h.coordinates},
                  {"score", h.score},
                  {"outcome", std::string(to_string(h.outcome))}};
        if (h.displaced_id) e["displaced_id"] = *h.displaced_id;
        hist.push_back(std::move(e));
    }
    return {{"version", kSnapshotVersion},
            {"island", island_},
            {"descriptor", descriptor_to_json(descriptor_)},
            {"cells", cells},
            {"history", hist}};
}

Archive Archive::from_json(const json& j) {
    try {
        if (!j.is_object()) throw ArchiveRestoreError("archive snapshot is not an object");
        const int version = j.at("version").get<int>();
        if (version != kSnapshotVersion)
            throw ArchiveRestoreError(fmt::format("unsupported archive snapshot version {}", version));
        Archive a(j.at("island").get<int>(), descriptor_from_json(j.at("descriptor")));
        for (const auto& c : j.at("cells")) {
            auto coords = c.at("coordinates").get<Coordinates>();
            if (coords.size() != a.descriptor_.dimensions.size())
                throw ArchiveRestoreError("cell coordinates do not match the descriptor");
            if (!a.cells_.emplace(coords, Elite{c.at("program").get<CandidateProgram>(), c.at("evaluation").get<Evaluation>()})
                     .second)
                throw ArchiveRestoreError("duplicate cell in archive snapshot");
        }
        for (const auto& e : j.at("history")) {
            HistoryEntry h;
            h.candidate_id = e.at("candidate_id").get<std::string>();
            h.coordinates = e.at("coordinates").get<Coordinates>();
            h.score = e.at("score").get<Rational>();
            h.outcome = parse_insert_outcome(e.at("outcome").get<std::string>());
            if (e.contains("displaced_id")) h.displaced_id = e["displaced_id"].get<std::string>();
            a.history_.push_back(std::move(h));
        }
        return a;
    } catch (const ArchiveRestoreError&) {
        throw;
    } catch (const std::exception& e) {
        throw ArchiveRestoreError(std::string("malformed archive snapshot: ") + e.what());
    }
}

void Archive::snapshot(const std::string& path) const {
    // Write then rename so a crash never leaves a truncated snapshot.
    const auto tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot write archive snapshot: " + tmp);
        out << to_json().dump(1) << '\n';
        if (!out) throw std::runtime_error("failed writing archive snapshot: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

Archive Archive::restore(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ArchiveRestoreError("cannot open archive snapshot: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ArchiveRestoreError("archive snapshot " + path + " is not valid JSON: " + e.what());
    }
    return from_json(j);
}

}  // namespace catbij
