#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "proact/classifier.hpp"
#include "proact/records.hpp"

namespace proact {

class Service;
class Platform;

struct BenchmarkImport {
  std::size_t total = 0;           // rows read
  std::size_t misclassified = 0;   // rows the model got wrong
  std::vector<SeedSample> stored;  // newly stored; texts already held are skipped
};

/// Predicts every row and stores the misclassified ones as seed samples.
BenchmarkImport importBenchmark(Service& service, const LabeledCorpus& rows);

/// Misclassified seeds in id order.
std::vector<SeedSample> misclassifiedSeeds(const Platform& platform);

/// Uniform sample without replacement; returns min(n, pool size) items.
std::vector<SeedSample> sampleWithoutReplacement(const std::vector<SeedSample>& pool, std::size_t n,
                                                 std::uint64_t seed);

/// Text,Human_Label,AI_Label,Category with the seed's category name, or empty.
std::string seedsCsv(const Platform& platform, const std::vector<SeedSample>& seeds);

}  // namespace proact
