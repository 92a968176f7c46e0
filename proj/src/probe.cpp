#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "wicbr/train.hpp"
#include "wicbr/util.hpp"

namespace wicbr {

double normalized_cross_correlation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) throw InvalidArgument("NCC needs equal non-empty arrays");
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 && sbb == 0.0) return a == b ? 1.0 : 0.0;
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

nlohmann::json to_json(const ProbeReport& r) {
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& c : r.classes)
    classes.push_back({{"class_id", c.class_id},
                       {"phase_corr", c.phase_corr},
                       {"dfs_corr", c.dfs_corr},
                       {"phase_mean", c.phase_mean},
                       {"dfs_mean", c.dfs_mean}});
  return {{"classes", classes},
          {"phase_corr", r.phase_mean},
          {"dfs_corr", r.dfs_mean},
          {"dfs_more_stable", r.dfs_more_stable}};
}

ProbeReport domain_stability_probe(const std::vector<LabeledRecording>& data,
                                   const PreprocessOptions& opt) {
  std::set<std::size_t> domains;
  std::set<int> classes;
  for (const auto& r : data) {
    domains.insert(r.domain_index);
    classes.insert(r.class_id);
  }
  if (domains.size() < 2) throw InvalidArgument("probe needs at least two domains");
  for (std::size_t d : domains)
    for (int c : classes) {
      bool found = false;
      for (const auto& r : data) found |= r.domain_index == d && r.class_id == c;
      if (!found)
        throw InvalidArgument("class " + std::to_string(c) + " missing from domain " + std::to_string(d));
    }

  std::vector<std::vector<double>> phase(data.size()), dfs(data.size());
  parallel_for(data.size(), [&](std::size_t i) {
    const auto ratio = csi_ratio(data[i].recording, opt.ratio);
    phase[i] = phase_extract(ratio.ratio, data[i].recording.fs, opt.unwrap).values.values;
    dfs[i] = dfs_spectrogram(data[i].recording, opt.stft).power.values;
  });

  // (class, rep) -> domain -> record index
  std::map<std::pair<int, int>, std::map<std::size_t, std::size_t>> groups;
  for (std::size_t i = 0; i < data.size(); ++i)
    groups[{data[i].class_id, data[i].rep}][data[i].domain_index] = i;

  ProbeReport report;
  report.dfs_more_stable = true;
  double phase_total = 0.0, dfs_total = 0.0;
  for (int c : classes) {
    ProbeClassReport cr;
    cr.class_id = static_cast<std::size_t>(c);
    for (const auto& [key, by_domain] : groups) {
      if (key.first != c) continue;
      for (auto a = by_domain.begin(); a != by_domain.end(); ++a)
        for (auto b = std::next(a); b != by_domain.end(); ++b) {
          cr.phase_corr.push_back(normalized_cross_correlation(phase[a->second], phase[b->second]));
          cr.dfs_corr.push_back(normalized_cross_correlation(dfs[a->second], dfs[b->second]));
        }
    }
    if (cr.phase_corr.empty())
      throw InvalidArgument("class " + std::to_string(c) + " has no (rep) shared across domains");
    for (std::size_t k = 0; k < cr.phase_corr.size(); ++k) {
      cr.phase_mean += cr.phase_corr[k];
      cr.dfs_mean += cr.dfs_corr[k];
    }
    cr.phase_mean /= static_cast<double>(cr.phase_corr.size());
    cr.dfs_mean /= static_cast<double>(cr.dfs_corr.size());
    report.dfs_more_stable = report.dfs_more_stable && cr.dfs_mean > cr.phase_mean;
    phase_total += cr.phase_mean;
    dfs_total += cr.dfs_mean;
    report.classes.push_back(std::move(cr));
  }
  report.phase_mean = phase_total / static_cast<double>(report.classes.size());
  report.dfs_mean = dfs_total / static_cast<double>(report.classes.size());
  return report;
}

}  // namespace wicbr
