#include "spinnet/runio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace spinnet {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_run_csv(const std::string& path, const TrainRun& run) {
  std::ofstream f(path);
  if (!f) throw FormatError("cannot open for writing: " + path);
  f << "# config_hash=" << (run.config_hash.empty() ? "-" : run.config_hash) << "\n";
  f << "# dataset_hash=" << (run.dataset_hash.empty() ? "-" : run.dataset_hash) << "\n";
  f << "epoch,train_error,test_error,wall_seconds,method,m,seed\n";
  for (const auto& r : run.records) {
    f << r.epoch << "," << fmt(r.train_error) << "," << fmt(r.test_error) << ","
      << fmt(r.wall_seconds) << "," << run.method << "," << run.m << "," << run.seed << "\n";
  }
}

TrainRun read_run_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw FormatError("cannot open: " + path);
  TrainRun run;
  std::string line;
  bool header_seen = false;
  int line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto grab = [&](const std::string& tag) -> std::string {
        auto pos = line.find(tag);
        return pos == std::string::npos ? "" : line.substr(pos + tag.size());
      };
      if (std::string v = grab("config_hash="); !v.empty()) run.config_hash = v;
      if (std::string v = grab("dataset_hash="); !v.empty()) run.dataset_hash = v;
      continue;
    }
    if (!header_seen) {
      if (line.rfind("epoch,", 0) != 0)
        throw FormatError(path + ": line " + std::to_string(line_no) + ": missing CSV header");
      header_seen = true;
      continue;
    }
    std::istringstream ls(line);
    std::string cell;
    EpochRecord rec;
    auto next = [&](const char* what) {
      if (!std::getline(ls, cell, ','))
        throw FormatError(path + ": line " + std::to_string(line_no) + ": missing " + what);
      return cell;
    };
    rec.epoch = std::stoi(next("epoch"));
    rec.train_error = std::stod(next("train_error"));
    rec.test_error = std::stod(next("test_error"));
    rec.wall_seconds = std::stod(next("wall_seconds"));
    run.method = next("method");
    run.m = std::stoi(next("m"));
    run.seed = std::stoull(next("seed"));
    run.records.push_back(rec);
  }
  if (run.records.empty()) throw FormatError(path + ": no data rows");
  return run;
}

void write_snapshot_csv(const std::string& path, const LandscapeSnapshot& snapshot,
                        const std::string& config_hash) {
  std::ofstream f(path);
  if (!f) throw FormatError("cannot open for writing: " + path);
  f << "# config_hash=" << (config_hash.empty() ? "-" : config_hash) << "\n";
  f << "# stress=" << fmt(snapshot.stress) << "\n";
  f << "# epoch=" << snapshot.epoch_tag << "\n";
  f << "x,y,class,image_id\n";
  for (const auto& p : snapshot.points)
    f << fmt(p.x) << "," << fmt(p.y) << "," << p.decoded_class << "," << p.image_id << "\n";
}

void write_compare_csv(const std::string& path, const CompareReport& report,
                       const std::string& config_hash) {
  std::ofstream f(path);
  if (!f) throw FormatError("cannot open for writing: " + path);
  f << "# config_hash=" << (config_hash.empty() ? "-" : config_hash) << "\n";
  f << "method,m,z_train,r2_train,z_test,r2_test,fit_from,fit_to,resource_multiple,reference\n";
  for (std::size_t k = 0; k < report.methods.size(); ++k) {
    const auto& s = report.methods[k];
    if (s.is_reference) {
      f << s.method << ",,"
        << fmt(s.reference_z) << ",,,,,,,1\n";
    } else {
      f << s.method << "," << s.m << "," << fmt(s.train_fit.z) << "," << fmt(s.train_fit.r_squared)
        << "," << fmt(s.test_fit.z) << "," << fmt(s.test_fit.r_squared) << ","
        << s.train_fit.first_epoch << "," << s.train_fit.last_epoch << ","
        << (k < report.resource_multiples.size() ? fmt(report.resource_multiples[k]) : "")
        << ",0\n";
    }
  }
}

}  // namespace spinnet
