#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "pivotmt/error.hpp"

namespace pivotmt::cli {

// Bad command-line usage detected after parsing (exit code 2).
class UsageError : public Error {
 public:
  using Error::Error;
};

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  int precision = 32;

  std::string out_or(const std::string& fallback) const { return out.empty() ? fallback : out; }
};

struct PrepareOptions {
  std::string src, tgt, features, split;
  std::optional<std::size_t> min_count;
};

struct TrainOptions {
  std::string corpus;
};

struct TranslateOptions {
  std::string checkpoint, corpus, input, output;
  std::optional<std::size_t> beam;
  std::optional<std::size_t> max_len;
};

struct RetrieveOptions {
  std::string checkpoint, corpus, input, output, method;
};

struct EvaluateOptions {
  std::string hyp, ref;
};

struct SupervisedOptions {
  std::string corpus;
  std::optional<std::size_t> subsample;
};

struct GradcheckOptions {
  std::size_t rounds = 1;
  double tolerance = 1e-4;
};

int cmd_prepare(const GlobalOptions& g, const PrepareOptions& o);
int cmd_synth(const GlobalOptions& g);
int cmd_train(const GlobalOptions& g, const TrainOptions& o);
int cmd_translate(const GlobalOptions& g, const TranslateOptions& o);
int cmd_retrieve(const GlobalOptions& g, const RetrieveOptions& o);
int cmd_evaluate(const GlobalOptions& g, const EvaluateOptions& o);
int cmd_baseline_supervised(const GlobalOptions& g, const SupervisedOptions& o);
int cmd_gradcheck(const GlobalOptions& g, const GradcheckOptions& o);

}  // namespace pivotmt::cli
