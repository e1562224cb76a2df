#pragma once

#include <filesystem>
#include <iosfwd>

#include "lemll/lemll.hpp"

namespace lemll {

// Plain-text bundle: config echo, label names, optional standardizer and
// the regression block. Doubles are written with 17 significant digits so
// a load reproduces every coefficient exactly. u_final and the training
// report are not stored.
void save_model(std::ostream& out, const LemllModel& model);
LemllModel load_model(std::istream& in);

void save_model(const std::filesystem::path& path, const LemllModel& model);
LemllModel load_model(const std::filesystem::path& path);

}  // namespace lemll
