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

#include "catbij/analysis.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <thread>
#include <tuple>

#include <fmt/format.h>

#include "catbij/engine.hpp"
#include "catbij/serialize.hpp"
#include "http_util.hpp"

namespace catbij {

using json = nlohmann::json;

RunLog parse_run_log(std::istream& in) {
    RunLog log;
    bool header = false;
    int line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        if (line.empty()) continue;
        json r;
        try {
            r = json::parse(line);
        } catch (const json::exception& e) {
            throw LogError(fmt::format("run log line {} is not valid JSON: {}", line_no, e.what()));
        }
        try {
            const auto kind = r.at("kind").get<std::string>();
            if (kind == "header") {
                if (r.at("schema").get<int>() != kRunLogSchema)
                    throw LogError(fmt::format("unsupported run log schema {}", r["schema"].dump()));
                log.problem = r.at("problem").get<std::string>();
                log.n_train = r.at("n_train").get<int>();
                header = true;
                continue;
            }
            if (!header) throw LogError("run log does not start with a header record");
            if (kind == "iteration") {
                LoggedIteration it;
                it.iteration = r.at("iteration").get<int>();
                it.island = r.at("island").get<int>();
                it.island_iteration = r.at("island_iteration").get<int>();
                it.status = r.at("status").get<std::string>();
                if (r.contains("candidate_id")) it.candidate_id = r["candidate_id"].get<std::string>();
                log.iterations.push_back(std::move(it));
            }
            if ((kind == "seed" || kind == "iteration") && r.contains("evaluation")) {
                LoggedCandidate c;
                c.id = r.at("candidate_id").get<std::string>();
                c.kind = kind;
                c.island = r.at("island").get<int>();
                c.iteration = r.at("iteration").get<int>();
                c.source = r.at("candidate").at("source").get<std::string>();
                c.docstring = r.at("candidate").value("docstring", std::string{});
                c.evaluation = r.at("evaluation").get<Evaluation>();
                log.candidates.push_back(std::move(c));
            }
        } catch (const LogError&) {
            throw;
        } catch (const std::exception& e) {
            throw LogError(fmt::format("run log line {}: {}", line_no, e.what()));
        }
    }
    if (!header) throw LogError("run log has no header record");
    return log;
}

RunLog load_run_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LogError("cannot open run log: " + path);
    return parse_run_log(in);
}

std::string functional_fingerprint(const std::vector<std::string>& inputs, const std::vector<OutputRecord>& records) {
    if (inputs.size() != records.size()) throw std::invalid_argument("fingerprint needs one record per input");
    std::string text;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        text += inputs[i];
        text += '\t';
        text += to_string(records[i].status);
        text += '\t';
        text += records[i].output.value_or("");
        text += '\n';
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 failed");
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

FunctionalGroups functional_groups(const RunLog& log, const ProblemSpec& problem) {
    FunctionalGroups out;
    out.n = log.n_train;
    const auto inputs = problem.domain_at(log.n_train);
    std::map<std::string, std::size_t> index;
    std::set<std::tuple<Rational, Rational, Rational, Rational>> tuples;
    for (const auto& c : log.candidates) {
        if (c.evaluation.n_eval != log.n_train || c.evaluation.records.size() != inputs.size()) continue;
        const auto fp = functional_fingerprint(inputs, c.evaluation.records);
        auto [it, fresh] = index.emplace(fp, out.groups.size());
        if (fresh) out.groups.push_back({fp, {}, c.evaluation.empirical});
        out.groups[it->second].members.push_back(c.id);
        const auto& s = c.evaluation.empirical;
        tuples.emplace(s.surjectivity, s.injectivity, s.validity, s.defined_fraction);
    }
    out.distinct_score_tuples = tuples.size();
    return out;
}

json groups_to_json(const FunctionalGroups& g) {
    json groups = json::array();
    for (const auto& grp : g.groups)
        groups.push_back({{"fingerprint", grp.fingerprint}, {"members", grp.members}, {"empirical", grp.empirical}});
    return {{"n", g.n},
            {"group_count", g.groups.size()},
            {"distinct_score_tuples", g.distinct_score_tuples},
            {"groups", groups}};
}

std::vector<std::vector<double>> TrigramEmbedder::embed(const std::vector<std::string>& texts) {
    std::vector<std::vector<double>> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
        std::vector<double> v(dim_, 0.0);
        // Pad so that one- and two-character texts still yield a trigram.
        const std::string s = "\x02" + t + "\x03";
        for (std::size_t i = 0; i + 3 <= s.size(); ++i) {
            std::uint64_t h = 1469598103934665603ULL;
            for (std::size_t k = 0; k < 3; ++k) {
                h ^= static_cast<unsigned char>(s[i + k]);
                h *= 1099511628211ULL;
            }
            v[h % dim_] += 1.0;
        }
        double norm = 0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        for (double& x : v) x /= norm;
        out.push_back(std::move(v));
    }
    return out;
}

HttpEmbedder::HttpEmbedder(std::string endpoint, std::string model, std::string api_key_env, RetryPolicy policy,
                           std::size_t batch)
    : endpoint_(std::move(endpoint)),
      model_(std::move(model)),
      api_key_env_(std::move(api_key_env)),
      policy_(policy),
      batch_(std::max<std::size_t>(batch, 1)),
      sleeper_([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }) {}

std::vector<std::vector<double>> HttpEmbedder::embed(const std::vector<std::string>& texts) {
    const auto endpoint = detail::parse_endpoint(endpoint_);
    std::map<std::string, std::string> headers;
    ModelSpec key_holder;
    key_holder.name = model_;
    key_holder.api_key_env = api_key_env_;
    if (const auto key = api_key_for(key_holder); !key.empty()) headers["Authorization"] = "Bearer " + key;

    std::vector<std::vector<double>> out;
    for (std::size_t start = 0; start < texts.size(); start += batch_) {
        const auto end = std::min(texts.size(), start + batch_);
        const json body = {{"model", model_},
                           {"input", std::vector<std::string>(texts.begin() + static_cast<std::ptrdiff_t>(start),
                                                              texts.begin() + static_cast<std::ptrdiff_t>(end))}};
        const auto payload = body.dump();
        const auto res = detail::post_with_retries(policy_, sleeper_, [&] {
            return detail::post_json(endpoint, "/embeddings", payload, headers, std::chrono::seconds(120));
        });
        try {
            const auto doc = json::parse(res.body);
            std::vector<std::vector<double>> batch(end - start);
            for (const auto& item : doc.at("data")) {
                const auto i = item.value("index", std::size_t{0});
                if (i >= batch.size()) throw ChatFailure(ChatFailureKind::protocol, "embedding index out of range");
                batch[i] = item.at("embedding").get<std::vector<double>>();
            }
            for (auto& v : batch) {
                if (v.empty()) throw ChatFailure(ChatFailureKind::protocol, "embedding response is missing vectors");
                out.push_back(std::move(v));
            }
        } catch (const json::exception& e) {
            throw ChatFailure(ChatFailureKind::protocol, std::string("unexpected embedding response: ") + e.what());
        }
    }
    return out;
}

std::vector<EmbeddingVector> embed_programs(const std::vector<LoggedCandidate>& candidates, Embedder& embedder) {
    std::vector<std::string> texts, ids;
    for (const auto& c : candidates) {
        texts.push_back(c.source);
        ids.push_back(c.id);
    }
    std::vector<std::vector<double>> vectors;
    try {
        vectors = embedder.embed(texts);
    } catch (const std::exception& e) {
        throw EmbeddingError(std::string("embedding failed: ") + e.what(), ids);
    }
    if (vectors.size() != candidates.size()) throw EmbeddingError("embedder returned the wrong number of vectors", ids);
    for (const auto& v : vectors)
        if (v.size() != vectors.front().size()) throw EmbeddingError("embedder returned vectors of mixed dimension", ids);
    std::vector<EmbeddingVector> out;
    for (std::size_t i = 0; i < candidates.size(); ++i) out.push_back({ids[i], embedder.provider(), std::move(vectors[i])});
    return out;
}

namespace {

std::vector<double> column_means(const Matrix& rows) {
    std::vector<double> mean(rows.front().size(), 0.0);
    for (const auto& r : rows)
        for (std::size_t j = 0; j < r.size(); ++j) mean[j] += r[j];
    for (double& m : mean) m /= static_cast<double>(rows.size());
    return mean;
}

void check_rows(const Matrix& rows) {
    if (rows.size() < 2) throw std::invalid_argument("PCA needs at least two points");
    for (const auto& r : rows)
        if (r.size() != rows.front().size() || r.empty()) throw std::invalid_argument("PCA rows must share a nonzero dimension");
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::vector<double> multiply(const Matrix& m, const std::vector<double>& v) {
    std::vector<double> out(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) out[i] = dot(m[i], v);
    return out;
}

void remove_projections(std::vector<double>& v, const Matrix& basis) {
    for (const auto& b : basis) {
        const double p = dot(v, b);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= p * b[i];
    }
}

bool normalize(std::vector<double>& v) {
    const double n = std::sqrt(dot(v, v));
    if (n < 1e-300) return false;
    for (double& x : v) x /= n;
    return true;
}

void fix_sign(std::vector<double>& v) {
    std::size_t arg = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (std::abs(v[i]) > std::abs(v[arg]) + 1e-12) arg = i;
    if (v[arg] < 0)
        for (double& x : v) x = -x;
}

}  // namespace

Matrix covariance_serial(const Matrix& rows) {
    check_rows(rows);
    const auto mean = column_means(rows);
    const std::size_t d = mean.size();
    Matrix cov(d, std::vector<double>(d, 0.0));
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a; b < d; ++b) {
            double s = 0;
            for (const auto& r : rows) s += (r[a] - mean[a]) * (r[b] - mean[b]);
            cov[a][b] = cov[b][a] = s / static_cast<double>(rows.size() - 1);
        }
    }
    return cov;
}

Matrix covariance_parallel(const Matrix& rows) {
    check_rows(rows);
    const auto mean = column_means(rows);
    const auto d = static_cast<long long>(mean.size());
    Matrix cov(mean.size(), std::vector<double>(mean.size(), 0.0));
    // Each (a, b >= a) cell is written by exactly one thread; same summation
    // order as the serial kernel, so results agree bit for bit.
#pragma omp parallel for schedule(dynamic, 8)
    for (long long a = 0; a < d; ++a) {
        const auto ua = static_cast<std::size_t>(a);
        for (std::size_t b = ua; b < mean.size(); ++b) {
            double s = 0;
            for (const auto& r : rows) s += (r[ua] - mean[ua]) * (r[b] - mean[b]);
            cov[ua][b] = cov[b][ua] = s / static_cast<double>(rows.size() - 1);
        }
    }
    return cov;
}

PcaResult pca_project(const Matrix& rows, std::size_t out_dims) {
    check_rows(rows);
    const std::size_t d = rows.front().size();
    if (out_dims == 0 || out_dims > d) throw std::invalid_argument("out_dims must lie in [1, dimension]");

    Matrix cov = covariance_parallel(rows);
    double trace = 0;
    for (std::size_t i = 0; i < d; ++i) trace += cov[i][i];
    const double scale = std::max(trace, 1e-300);

    PcaResult res;
    for (std::size_t k = 0; k < out_dims; ++k) {
        // Deterministic start with no special alignment to any axis.
        std::vector<double> v(d);
        for (std::size_t i = 0; i < d; ++i) v[i] = 1.0 + std::fmod(0.6180339887498949 * static_cast<double>(i + k + 1), 1.0);
        remove_projections(v, res.components);
        double lambda = 0;
        bool found = normalize(v) && trace > 1e-15;
        for (int iter = 0; found && iter < 20000; ++iter) {
            auto w = multiply(cov, v);
            remove_projections(w, res.components);
            lambda = dot(v, w);
            double residual = 0;
            for (std::size_t i = 0; i < d; ++i) residual += (w[i] - lambda * v[i]) * (w[i] - lambda * v[i]);
            if (std::sqrt(residual) <= 1e-9 * scale) break;
            if (!normalize(w)) {
                found = false;
                break;
            }
            v = std::move(w);
        }
        if (!found || lambda <= 1e-12 * scale) {
            // No variance left: complete the basis with the first unused axis.
            lambda = 0;
            for (std::size_t axis = 0; axis < d; ++axis) {
                std::vector<double> e(d, 0.0);
                e[axis] = 1.0;
                remove_projections(e, res.components);
                if (dot(e, e) > 1e-6 && normalize(e)) {
                    v = std::move(e);
                    break;
                }
            }
        }
        fix_sign(v);
        // Deflate.
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) cov[i][j] -= lambda * v[i] * v[j];
        res.components.push_back(v);
        res.eigenvalues.push_back(lambda);
        res.explained_ratio.push_back(trace > 1e-15 ? lambda / trace : 0.0);
    }

    const auto mean = column_means(rows);
    for (const auto& r : rows) {
        std::vector<double> centered(d);
        for (std::size_t i = 0; i < d; ++i) centered[i] = r[i] - mean[i];
        std::vector<double> coords;
        for (const auto& c : res.components) coords.push_back(trace > 1e-15 ? dot(centered, c) : 0.0);
        res.coordinates.push_back(std::move(coords));
    }
    return res;
}

namespace {

MetricPoint point(const Evaluation& e) {
    const auto& s = e.empirical;
    return {s.surjectivity.to_double(), s.injectivity.to_double(), s.validity.to_double(), s.combined.to_double(),
            e.final_score.to_double()};
}

}  // namespace

std::vector<ProgressionRow> metric_progression(const RunLog& log) {
    std::map<std::string, const LoggedCandidate*> by_id;
    for (const auto& c : log.candidates) by_id[c.id] = &c;

    struct Best {
        Rational score;
        const LoggedCandidate* who = nullptr;
    };
    std::map<int, Best> best;
    auto offer = [&](const LoggedCandidate& c) {
        auto& b = best[c.island];
        if (!b.who || c.evaluation.final_score > b.score) b = {c.evaluation.final_score, &c};
    };
    for (const auto& c : log.candidates)
        if (c.kind == "seed") offer(c);

    std::vector<ProgressionRow> rows;
    for (const auto& it : log.iterations) {
        ProgressionRow row;
        row.iteration = it.iteration;
        row.island = it.island;
        row.island_iteration = it.island_iteration;
        row.status = it.status;
        if (it.candidate_id) {
            if (auto f = by_id.find(*it.candidate_id); f != by_id.end()) {
                row.raw = point(f->second->evaluation);
                offer(*f->second);
            }
        }
        if (const auto b = best.find(it.island); b != best.end() && b->second.who) {
            row.best = point(b->second.who->evaluation);
            row.best_id = b->second.who->id;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string progression_csv(const std::vector<ProgressionRow>& rows) {
    std::string out =
        "iteration,island,island_iteration,status,surjectivity,injectivity,validity,combined,final,"
        "best_surjectivity,best_injectivity,best_validity,best_combined,best_final,best_id\n";
    auto num = [](double x) { return fmt::format("{:.6f}", x); };
    for (const auto& r : rows) {
        out += fmt::format("{},{},{},{},", r.iteration, r.island, r.island_iteration, r.status);
        if (r.raw) {
            out += fmt::format("{},{},{},{},{},", num(r.raw->surjectivity), num(r.raw->injectivity), num(r.raw->validity),
                               num(r.raw->combined), num(r.raw->final_score));
        } else {
            out += ",,,,,";
        }
        out += fmt::format("{},{},{},{},{},{}\n", num(r.best.surjectivity), num(r.best.injectivity), num(r.best.validity),
                           num(r.best.combined), num(r.best.final_score), r.best_id);
    }
    return out;
}

}  // namespace catbij
