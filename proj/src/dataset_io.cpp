#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "zoka/problems.hpp"
#include "zoka/trace.hpp"

namespace zoka {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream stream(line);
  std::string cell;
  while (std::getline(stream, cell, ',')) cells.push_back(cell);
  return cells;
}

double parse_number(const std::string& cell) {
  std::size_t used = 0;
  const double value = std::stod(cell, &used);
  if (used != cell.size() && cell.find_first_not_of(" \r\t", used) != std::string::npos) {
    throw ArgumentError("malformed number in dataset: '" + cell + "'");
  }
  return value;
}

}  // namespace

void write_dataset_csv(const LogisticDataset& data, std::ostream& out) {
  data.validate();
  out << data.d() << ',' << data.n() << '\n';
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    for (Eigen::Index j = 0; j < data.d(); ++j) out << format_double(data.features(i, j)) << ',';
    out << format_double(data.labels[i]) << '\n';
  }
}

LogisticDataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ArgumentError("dataset CSV is empty");
  const auto header = split_csv_line(line);
  if (header.size() != 2) throw ArgumentError("dataset header must be 'd,n'");
  const long d = std::stol(header[0]);
  const long n = std::stol(header[1]);
  require(d >= 1 && n >= 1, "dataset header must carry positive d and n");

  LogisticDataset data{Matrix(n, d), Vector(n)};
  for (long i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw ArgumentError("dataset CSV ended early");
    const auto cells = split_csv_line(line);
    if (static_cast<long>(cells.size()) != d + 1) {
      throw ArgumentError("dataset row " + std::to_string(i) + " has the wrong width");
    }
    for (long j = 0; j < d; ++j) data.features(i, j) = parse_number(cells[j]);
    data.labels[i] = parse_number(cells[d]);
  }
  data.validate();
  return data;
}

void save_dataset_csv(const LogisticDataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot open " + path.string() + " for writing");
  write_dataset_csv(data, out);
}

LogisticDataset load_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open " + path.string());
  return read_dataset_csv(in);
}

}  // namespace zoka
