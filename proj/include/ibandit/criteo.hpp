#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ibandit/core.hpp"

namespace ibandit {
namespace criteo {

inline constexpr std::size_t kFeatureCount = 12;

struct UpliftRow {
    std::array<double, kFeatureCount> features{};
    int exposure = 0;  // binary treatment
    int visit = 0;     // binary outcome
};

// Parses a CSV with a header row of 12 feature columns plus `exposure` and
// `visit`, uniformly subsampling without replacement to max_rows when the file
// holds more (max_rows == 0 keeps everything).
std::vector<UpliftRow> load_rows(const std::string& path, std::size_t max_rows, Rng& rng);

struct KmeansResult {
    std::vector<int> assignment;  // cluster index per row, in [0, K)
    std::vector<std::array<double, kFeatureCount>> centroids;
    double inertia = 0.0;
    int iterations = 0;
};

// Lloyd's algorithm on z-scored features with k-means++ seeding; an emptied
// cluster is reseeded at the point farthest from its centroid.
KmeansResult kmeans(const std::vector<UpliftRow>& rows, std::size_t k, Rng& rng, int max_iters = 100);

// Per-cluster mean of exposure*visit; the expected reward of the cluster arm.
std::vector<double> arm_means(const std::vector<UpliftRow>& rows, const std::vector<int>& assignment,
                              std::size_t k);

// JSON manifest {K, means, cluster_sizes} consumable as a reward-model config.
std::string manifest_json(const std::vector<double>& means, const std::vector<std::int64_t>& sizes);
std::vector<double> means_from_manifest(const std::string& json_text);

// Synthetic dataset with well-separated feature blobs and per-blob
// exposure/visit probabilities, for exercising the pipeline end to end.
void write_synthetic_fixture(const std::string& path, std::size_t rows_per_blob, std::size_t blobs,
                             Rng& rng);

}  // namespace criteo
}  // namespace ibandit
