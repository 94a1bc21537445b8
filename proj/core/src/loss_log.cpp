#include "pivotmt/loss_log.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "pivotmt/error.hpp"
#include "pivotmt/text.hpp"

namespace pivotmt {
namespace {

void put(std::ostringstream& out, const std::optional<double>& v) {
  out << ',';
  if (v) out << format_number(*v);
}

std::optional<double> field(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw FormatError("loss log: bad number '" + s + "'");
  return v;
}

}  // namespace

void LossLog::append(const LossRow& row) {
  if (!rows_.empty() && row.epoch <= rows_.back().epoch) {
    throw ContractError("loss log: epoch " + std::to_string(row.epoch) + " after " +
                        std::to_string(rows_.back().epoch));
  }
  rows_.push_back(row);
}

std::string LossLog::to_csv() const {
  std::ostringstream out;
  out << kHeader << '\n';
  for (const LossRow& r : rows_) {
    out << r.epoch;
    put(out, r.train_je);
    put(out, r.train_jd);
    put(out, r.train_jall);
    put(out, r.val_loss);
    put(out, r.test_loss);
    put(out, r.seconds);
    out << '\n';
  }
  return out.str();
}

void LossLog::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  f << to_csv();
  if (!f) throw FormatError("loss log: cannot write " + path);
}

LossLog LossLog::parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw FormatError("loss log: missing header");
  LossLog log;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (cells.size() != 7) throw FormatError("loss log: expected 7 columns in '" + line + "'");
    LossRow r;
    const auto epoch = field(cells[0]);
    if (!epoch) throw FormatError("loss log: missing epoch");
    r.epoch = static_cast<std::size_t>(*epoch);
    r.train_je = field(cells[1]);
    r.train_jd = field(cells[2]);
    r.train_jall = field(cells[3]);
    r.val_loss = field(cells[4]);
    r.test_loss = field(cells[5]);
    r.seconds = field(cells[6]);
    log.append(r);
  }
  return log;
}

}  // namespace pivotmt
