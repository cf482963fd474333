#include "proact/benchmark.hpp"

#include <set>

#include "proact/analytics.hpp"
#include "proact/csv.hpp"
#include "proact/random.hpp"
#include "proact/service.hpp"

namespace proact {

BenchmarkImport importBenchmark(Service& service, const LabeledCorpus& rows) {
  BenchmarkImport out;
  std::set<std::string> held = service.read([](const Platform& p) {
    std::set<std::string> texts;
    for (const auto& [id, s] : p.seeds()) texts.insert(s.text);
    return texts;
  });
  const auto model = service.sharedModel();
  for (const auto& [text, label] : rows) {
    ++out.total;
    if (model->predict(text).label == label) continue;
    ++out.misclassified;
    if (!held.insert(text).second) continue;
    out.stored.push_back(service.importSeed(text, label, std::nullopt));
  }
  return out;
}

std::vector<SeedSample> misclassifiedSeeds(const Platform& platform) {
  std::vector<SeedSample> out;
  for (const auto& [id, s] : platform.seeds()) {
    if (s.prediction.label != s.humanLabel) out.push_back(s);
  }
  return out;
}

std::vector<SeedSample> sampleWithoutReplacement(const std::vector<SeedSample>& pool, std::size_t n,
                                                 std::uint64_t seed) {
  std::vector<SeedSample> items = pool;
  Rng rng(seed);
  const std::size_t k = std::min(n, items.size());
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(items.size() - i));
    std::swap(items[i], items[j]);
  }
  items.resize(k);
  return items;
}

std::string seedsCsv(const Platform& platform, const std::vector<SeedSample>& seeds) {
  std::string out = std::string(kExportHeader) + "\n";
  for (const auto& s : seeds) {
    std::string category;
    if (s.category) {
      if (auto it = platform.categories().find(*s.category); it != platform.categories().end()) category = it->second.name;
    }
    out += csv::formatRow({s.text, std::string(toString(s.humanLabel)), std::string(toString(s.prediction.label)),
                           category});
  }
  return out;
}

}  // namespace proact
