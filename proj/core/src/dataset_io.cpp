#include "crteffects/dataset_io.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include "crteffects/errors.hpp"

namespace crteffects {

namespace {

[[noreturn]] void parse_fail(std::size_t line, const std::string& message) {
  throw Error(ErrorCode::parse_error,
              "line " + std::to_string(line) + ": " + message);
}

void check_label(const std::optional<std::string>& label) {
  if (!label) return;
  if (label->find_first_of(",\n\r\"") != std::string::npos) {
    throw Error(ErrorCode::invalid_dataset,
                "stratum label '" + *label +
                    "' contains a comma, quote, or line break");
  }
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

int parse_binary(std::string_view field, std::size_t line, const char* name) {
  if (field == "0") return 0;
  if (field == "1") return 1;
  parse_fail(line, std::string(name) + " must be 0 or 1, got '" +
                       std::string(field) + "'");
}

bool any_labels(const std::vector<ClusterRecord>& clusters) {
  for (const ClusterRecord& cluster : clusters) {
    if (cluster.stratum_label) return true;
  }
  return false;
}

bool any_labels(const std::vector<WorldCluster>& clusters) {
  for (const WorldCluster& cluster : clusters) {
    if (cluster.stratum_label) return true;
  }
  return false;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::parse_error, "cannot open '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::parse_error, "cannot write '" + path + "'");
  }
  out << contents;
}

}  // namespace

std::string serialize_dataset(const TrialDataset& dataset) {
  const bool with_labels = any_labels(dataset.clusters);
  std::string out = with_labels
                        ? "cluster_id,arm,participation,outcome,stratum_label\n"
                        : "cluster_id,arm,participation,outcome\n";
  for (const ClusterRecord& cluster : dataset.clusters) {
    check_label(cluster.stratum_label);
    const std::string prefix = cluster.cluster_id + "," +
                               std::to_string(cluster.arm) + ",";
    const std::string suffix =
        with_labels ? "," + cluster.stratum_label.value_or("") : "";
    for (const Individual& person : cluster.individuals) {
      out += prefix;
      out += person.participation ? '1' : '0';
      out += ',';
      out += person.outcome ? '1' : '0';
      out += suffix;
      out += '\n';
    }
  }
  return out;
}

void write_dataset(const TrialDataset& dataset, const std::string& path) {
  write_file(path, serialize_dataset(dataset));
}

TrialDataset parse_dataset(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::parse_error, "empty dataset file");
  }
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  bool with_labels;
  if (line == "cluster_id,arm,participation,outcome") {
    with_labels = false;
  } else if (line == "cluster_id,arm,participation,outcome,stratum_label") {
    with_labels = true;
  } else {
    parse_fail(line_no, "unexpected header '" + line + "'");
  }

  std::vector<DatasetRow> rows;
  std::unordered_map<std::string, int> arm_of;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_fields(line);
    const std::size_t expected = with_labels ? 5 : 4;
    if (fields.size() != expected) {
      parse_fail(line_no, "expected " + std::to_string(expected) +
                              " fields, got " + std::to_string(fields.size()));
    }
    DatasetRow row;
    row.cluster_id = std::string(fields[0]);
    if (row.cluster_id.empty()) parse_fail(line_no, "empty cluster_id");
    row.arm = parse_binary(fields[1], line_no, "arm");
    row.participation = parse_binary(fields[2], line_no, "participation");
    row.outcome = parse_binary(fields[3], line_no, "outcome");
    if (with_labels && !fields[4].empty()) {
      row.stratum_label = std::string(fields[4]);
    }
    auto [it, inserted] = arm_of.try_emplace(row.cluster_id, row.arm);
    if (!inserted && it->second != row.arm) {
      parse_fail(line_no, "arm changes within cluster '" + row.cluster_id + "'");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw Error(ErrorCode::parse_error, "dataset has a header but no rows");
  }
  TrialDataset dataset = from_rows(rows);
  validate_dataset(dataset);
  return dataset;
}

TrialDataset read_dataset(const std::string& path) {
  std::istringstream in(read_file(path));
  return parse_dataset(in);
}

std::string serialize_world(const PotentialWorld& world) {
  const bool with_labels = any_labels(world.clusters);
  std::string out =
      with_labels
          ? "cluster_id,participation,y_vaccine,y_control,stratum_label\n"
          : "cluster_id,participation,y_vaccine,y_control\n";
  for (const WorldCluster& cluster : world.clusters) {
    check_label(cluster.stratum_label);
    const std::string suffix =
        with_labels ? "," + cluster.stratum_label.value_or("") : "";
    for (const WorldIndividual& person : cluster.individuals) {
      out += cluster.cluster_id;
      out += ',';
      out += person.participation ? '1' : '0';
      out += ',';
      out += person.y_vaccine ? '1' : '0';
      out += ',';
      out += person.y_control ? '1' : '0';
      out += suffix;
      out += '\n';
    }
  }
  return out;
}

void write_world(const PotentialWorld& world, const std::string& path) {
  write_file(path, serialize_world(world));
}

PotentialWorld parse_world(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::parse_error, "empty world file");
  }
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  bool with_labels;
  if (line == "cluster_id,participation,y_vaccine,y_control") {
    with_labels = false;
  } else if (line ==
             "cluster_id,participation,y_vaccine,y_control,stratum_label") {
    with_labels = true;
  } else {
    parse_fail(line_no, "unexpected header '" + line + "'");
  }

  PotentialWorld world;
  std::unordered_map<std::string, std::size_t> index;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_fields(line);
    const std::size_t expected = with_labels ? 5 : 4;
    if (fields.size() != expected) {
      parse_fail(line_no, "expected " + std::to_string(expected) +
                              " fields, got " + std::to_string(fields.size()));
    }
    std::string id(fields[0]);
    if (id.empty()) parse_fail(line_no, "empty cluster_id");
    auto [it, inserted] = index.try_emplace(id, world.clusters.size());
    if (inserted) {
      WorldCluster cluster;
      cluster.cluster_id = id;
      if (with_labels && !fields[4].empty()) {
        cluster.stratum_label = std::string(fields[4]);
      }
      world.clusters.push_back(std::move(cluster));
    }
    WorldIndividual person;
    person.participation = static_cast<std::uint8_t>(
        parse_binary(fields[1], line_no, "participation"));
    person.y_vaccine = static_cast<std::uint8_t>(
        parse_binary(fields[2], line_no, "y_vaccine"));
    person.y_control = static_cast<std::uint8_t>(
        parse_binary(fields[3], line_no, "y_control"));
    world.clusters[it->second].individuals.push_back(person);
  }
  if (world.clusters.empty()) {
    throw Error(ErrorCode::parse_error, "world has a header but no rows");
  }
  return world;
}

PotentialWorld read_world(const std::string& path) {
  std::istringstream in(read_file(path));
  return parse_world(in);
}

}  // namespace crteffects
