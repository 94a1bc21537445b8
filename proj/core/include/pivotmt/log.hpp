#pragma once

#include <functional>
#include <string_view>

namespace pivotmt {

using WarningSink = std::function<void(std::string_view)>;

// Library warnings go to stderr unless a sink is installed; returns the
// previous sink (empty for the default).
WarningSink set_warning_sink(WarningSink sink);
void warn(std::string_view message);

}  // namespace pivotmt
