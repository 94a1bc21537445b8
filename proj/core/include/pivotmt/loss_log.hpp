#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace pivotmt {

struct LossRow {
  std::size_t epoch = 0;
  std::optional<double> train_je;
  std::optional<double> train_jd;
  std::optional<double> train_jall;
  std::optional<double> val_loss;
  std::optional<double> test_loss;
  std::optional<double> seconds;
};

// Per-epoch losses; epochs must strictly increase.
class LossLog {
 public:
  static constexpr const char* kHeader = "epoch,train_JE,train_JD,train_Jall,val_loss,test_loss,seconds";

  // Throws ContractError when row.epoch does not exceed the last epoch.
  void append(const LossRow& row);
  const std::vector<LossRow>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }
  std::size_t last_epoch() const noexcept { return rows_.empty() ? 0 : rows_.back().epoch; }

  // Undefined values are written as empty fields.
  std::string to_csv() const;
  void save(const std::string& path) const;
  static LossLog parse_csv(const std::string& text);

 private:
  std::vector<LossRow> rows_;
};

}  // namespace pivotmt
