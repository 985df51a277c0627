#include "sskinetic/field_io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace sskinetic {

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

void write_field(const std::string& path, const VelocityGrid& grid,
                 const ScalarField& values, Real time) {
  if (values.size() != grid.size())
    throw std::runtime_error("write_field: value count does not match grid");
  const bool binary = ends_with(path, ".f64");
  if (!binary && !ends_with(path, ".csv"))
    throw std::runtime_error("write_field: path must end in .csv or .f64");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_field: cannot open " + path);

  nlohmann::json header;
  header["L"] = grid.L;
  header["N0"] = grid.n0;
  header["time"] = time;
  out << header.dump() << "\n";

  if (binary) {
    out.write(reinterpret_cast<const char*>(values.data()),
              std::streamsize(sizeof(Real)) * values.size());
  } else {
    char buf[40];
    for (std::int64_t i = 0; i < values.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g\n", values[i]);
      out << buf;
    }
  }
  if (!out) throw std::runtime_error("write_field: write failed for " + path);
}

FieldSnapshot read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_field: cannot open " + path);

  std::string header_line;
  if (!std::getline(in, header_line))
    throw std::runtime_error("read_field: missing header in " + path);

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_line);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("read_field: bad header in " + path + ": " +
                             e.what());
  }
  if (!header.contains("L") || !header.contains("N0") ||
      !header.contains("time"))
    throw std::runtime_error("read_field: header missing L/N0/time in " + path);

  FieldSnapshot snap;
  snap.grid = make_grid(header["L"].get<Real>(), header["N0"].get<int>());
  snap.time = header["time"].get<Real>();
  snap.values.resize(snap.grid.size());

  if (ends_with(path, ".f64")) {
    in.read(reinterpret_cast<char*>(snap.values.data()),
            std::streamsize(sizeof(Real)) * snap.values.size());
    if (in.gcount() !=
        std::streamsize(sizeof(Real)) * snap.values.size())
      throw std::runtime_error("read_field: truncated payload in " + path);
  } else if (ends_with(path, ".csv")) {
    std::string line;
    for (std::int64_t i = 0; i < snap.values.size(); ++i) {
      if (!std::getline(in, line))
        throw std::runtime_error("read_field: truncated payload in " + path);
      try {
        snap.values[i] = std::stod(line);
      } catch (const std::exception&) {
        throw std::runtime_error("read_field: bad value at line " +
                                 std::to_string(i + 2) + " of " + path);
      }
    }
  } else {
    throw std::runtime_error("read_field: path must end in .csv or .f64");
  }
  return snap;
}

}  // namespace sskinetic
