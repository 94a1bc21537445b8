#include "pivotmt/log.hpp"

#include <iostream>

namespace pivotmt {
namespace {

WarningSink& sink() {
  static WarningSink s;
  return s;
}

}  // namespace

WarningSink set_warning_sink(WarningSink s) {
  WarningSink old = std::move(sink());
  sink() = std::move(s);
  return old;
}

void warn(std::string_view message) {
  if (sink()) {
    sink()(message);
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

}  // namespace pivotmt
