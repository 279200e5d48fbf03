#include "ibandit/criteo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace ibandit {
namespace criteo {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

int parse_binary(const std::string& s, std::size_t line_no, const char* what) {
    if (s == "0") {
        return 0;
    }
    if (s == "1") {
        return 1;
    }
    throw ParseError("line " + std::to_string(line_no) + ": " + what + " must be 0 or 1, got '" + s + "'");
}

double sqdist(const std::array<double, kFeatureCount>& a, const std::array<double, kFeatureCount>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        const double diff = a[i] - b[i];
        d += diff * diff;
    }
    return d;
}

}  // namespace

std::vector<UpliftRow> load_rows(const std::string& path, std::size_t max_rows, Rng& rng) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw SchemaError(path + " is empty");
    }
    const auto header = split_csv_line(line);
    if (header.size() != kFeatureCount + 2) {
        throw SchemaError(path + " has " + std::to_string(header.size()) + " columns, expected " +
                          std::to_string(kFeatureCount + 2));
    }

    // Reservoir sampling keeps a uniform without-replacement subsample while
    // reading a file of unknown length.
    std::vector<UpliftRow> rows;
    std::size_t seen = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != kFeatureCount + 2) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(kFeatureCount + 2) + " columns, got " +
                             std::to_string(fields.size()));
        }
        UpliftRow row;
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            try {
                std::size_t used = 0;
                row.features[i] = std::stod(fields[i], &used);
                if (used != fields[i].size()) {
                    throw std::invalid_argument("trailing characters");
                }
            } catch (const std::exception&) {
                throw ParseError("line " + std::to_string(line_no) + ": feature " + std::to_string(i) +
                                 " is not numeric: '" + fields[i] + "'");
            }
        }
        row.exposure = parse_binary(fields[kFeatureCount], line_no, "exposure");
        row.visit = parse_binary(fields[kFeatureCount + 1], line_no, "visit");

        ++seen;
        if (max_rows == 0 || rows.size() < max_rows) {
            rows.push_back(row);
        } else {
            std::uniform_int_distribution<std::size_t> pick(0, seen - 1);
            const std::size_t slot = pick(rng);
            if (slot < max_rows) {
                rows[slot] = row;
            }
        }
    }
    return rows;
}

KmeansResult kmeans(const std::vector<UpliftRow>& rows, std::size_t k, Rng& rng, int max_iters) {
    if (k < 1 || k > rows.size()) {
        throw ValidationError("cluster count must lie in [1, rows]");
    }
    const std::size_t n = rows.size();

    // Z-score each feature column so no single scale dominates the metric.
    std::array<double, kFeatureCount> mean{};
    std::array<double, kFeatureCount> stdev{};
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            mean[i] += row.features[i];
        }
    }
    for (auto& v : mean) {
        v /= static_cast<double>(n);
    }
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            const double d = row.features[i] - mean[i];
            stdev[i] += d * d;
        }
    }
    for (auto& v : stdev) {
        v = std::sqrt(v / static_cast<double>(n));
        if (v < 1e-12) {
            v = 1.0;  // constant column
        }
    }
    std::vector<std::array<double, kFeatureCount>> pts(n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            pts[r][i] = (rows[r].features[i] - mean[i]) / stdev[i];
        }
    }

    // k-means++ seeding.
    std::vector<std::array<double, kFeatureCount>> centroids;
    centroids.reserve(k);
    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    centroids.push_back(pts[first(rng)]);
    std::vector<double> dist2(n, std::numeric_limits<double>::max());
    while (centroids.size() < k) {
        double total = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            dist2[r] = std::min(dist2[r], sqdist(pts[r], centroids.back()));
            total += dist2[r];
        }
        if (total <= 0.0) {
            // All remaining points coincide with a centroid; duplicate one.
            centroids.push_back(pts[first(rng)]);
            continue;
        }
        std::uniform_real_distribution<double> u(0.0, total);
        double target = u(rng);
        std::size_t chosen = n - 1;
        for (std::size_t r = 0; r < n; ++r) {
            target -= dist2[r];
            if (target <= 0.0) {
                chosen = r;
                break;
            }
        }
        centroids.push_back(pts[chosen]);
    }

    KmeansResult result;
    result.assignment.assign(n, 0);
    std::vector<std::array<double, kFeatureCount>> sums(k);
    std::vector<std::size_t> counts(k);
    for (int iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        for (std::size_t r = 0; r < n; ++r) {
            double best = std::numeric_limits<double>::max();
            int best_c = 0;
            for (std::size_t c = 0; c < k; ++c) {
                const double d = sqdist(pts[r], centroids[c]);
                if (d < best) {
                    best = d;
                    best_c = static_cast<int>(c);
                }
            }
            if (result.assignment[r] != best_c || iter == 0) {
                changed = changed || result.assignment[r] != best_c;
                result.assignment[r] = best_c;
            }
        }
        result.iterations = iter + 1;
        for (auto& s : sums) {
            s.fill(0.0);
        }
        std::fill(counts.begin(), counts.end(), std::size_t{0});
        for (std::size_t r = 0; r < n; ++r) {
            const auto c = static_cast<std::size_t>(result.assignment[r]);
            counts[c] += 1;
            for (std::size_t i = 0; i < kFeatureCount; ++i) {
                sums[c][i] += pts[r][i];
            }
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // Reseed the emptied cluster at the point farthest from its
                // current centroid assignment.
                std::size_t far = 0;
                double far_d = -1.0;
                for (std::size_t r = 0; r < n; ++r) {
                    const double d =
                        sqdist(pts[r], centroids[static_cast<std::size_t>(result.assignment[r])]);
                    if (d > far_d) {
                        far_d = d;
                        far = r;
                    }
                }
                centroids[c] = pts[far];
                changed = true;
                continue;
            }
            for (std::size_t i = 0; i < kFeatureCount; ++i) {
                centroids[c][i] = sums[c][i] / static_cast<double>(counts[c]);
            }
        }
        if (!changed && iter > 0) {
            break;
        }
    }

    result.inertia = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        result.inertia += sqdist(pts[r], centroids[static_cast<std::size_t>(result.assignment[r])]);
    }
    result.centroids = std::move(centroids);
    return result;
}

std::vector<double> arm_means(const std::vector<UpliftRow>& rows, const std::vector<int>& assignment,
                              std::size_t k) {
    if (rows.size() != assignment.size()) {
        throw ValidationError("every row needs a cluster assignment");
    }
    std::vector<double> sums(k, 0.0);
    std::vector<std::int64_t> counts(k, 0);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto c = static_cast<std::size_t>(assignment[r]);
        if (c >= k) {
            throw ValidationError("assignment index out of range");
        }
        counts[c] += 1;
        sums[c] += static_cast<double>(rows[r].exposure * rows[r].visit);
    }
    std::vector<double> means(k, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] == 0) {
            throw EmptyClusterMeansError("cluster " + std::to_string(c) + " holds no rows");
        }
        means[c] = sums[c] / static_cast<double>(counts[c]);
    }
    return means;
}

std::string manifest_json(const std::vector<double>& means, const std::vector<std::int64_t>& sizes) {
    nlohmann::json j;
    j["K"] = means.size();
    j["means"] = means;
    j["cluster_sizes"] = sizes;
    return j.dump(2);
}

std::vector<double> means_from_manifest(const std::string& json_text) {
    const auto j = nlohmann::json::parse(json_text);
    if (!j.contains("means") || !j["means"].is_array()) {
        throw SchemaError("manifest lacks a means array");
    }
    return j["means"].get<std::vector<double>>();
}

void write_synthetic_fixture(const std::string& path, std::size_t rows_per_blob, std::size_t blobs,
                             Rng& rng) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path);
    }
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        out << 'f' << i << ',';
    }
    out << "exposure,visit\n";
    std::normal_distribution<double> noise(0.0, 0.05);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t b = 0; b < blobs; ++b) {
        const double center = static_cast<double>(b) * 10.0;
        const double p_exposure = 0.3 + 0.4 * (static_cast<double>(b) / std::max<std::size_t>(1, blobs - 1));
        const double p_visit = 0.2 + 0.6 * (static_cast<double>(b) / std::max<std::size_t>(1, blobs - 1));
        for (std::size_t r = 0; r < rows_per_blob; ++r) {
            for (std::size_t i = 0; i < kFeatureCount; ++i) {
                out << center + noise(rng) << ',';
            }
            out << (u(rng) < p_exposure ? 1 : 0) << ',' << (u(rng) < p_visit ? 1 : 0) << '\n';
        }
    }
}

}  // namespace criteo
}  // namespace ibandit
