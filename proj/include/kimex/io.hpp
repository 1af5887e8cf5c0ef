#pragma once

#include "kimex/integrator.hpp"
#include "kimex/moments.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace kimex {

/// Flat binary field record: header (int32 dv, int32 n_per_dim,
/// float64 v_max, int32 n_x), payload row-major doubles (cell-major,
/// velocity node fastest).
inline void write_field(std::ostream& out, const DistributionField& f) {
  const std::int32_t dv = f.v.dim, n = f.v.n, nx = f.x.n;
  out.write(reinterpret_cast<const char*>(&dv), sizeof dv);
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(&f.v.v_max), sizeof(double));
  out.write(reinterpret_cast<const char*>(&nx), sizeof nx);
  for (int i = 0; i < f.cells(); ++i)
    for (int k = 0; k < f.nodes(); ++k) {
      const double v = f.values(i, k);
      out.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
}

inline void write_field(const std::string& path, const DistributionField& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_field(out, f);
}

inline DistributionField read_field(std::istream& in) {
  std::int32_t dv = 0, n = 0, nx = 0;
  double v_max = 0.0;
  in.read(reinterpret_cast<char*>(&dv), sizeof dv);
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  in.read(reinterpret_cast<char*>(&v_max), sizeof v_max);
  in.read(reinterpret_cast<char*>(&nx), sizeof nx);
  if (!in) throw std::runtime_error("field record: truncated header");
  auto f = make_field(make_velocity_grid(dv, n, v_max), make_spatial_grid(nx));
  for (int i = 0; i < f.cells(); ++i)
    for (int k = 0; k < f.nodes(); ++k) {
      double v;
      in.read(reinterpret_cast<char*>(&v), sizeof v);
      f.values(i, k) = v;
    }
  if (!in) throw std::runtime_error("field record: truncated payload");
  return f;
}

inline DistributionField read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return read_field(in);
}

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// CSV of cell moments: x, rho, u components, T, E.
inline void write_moments_csv(std::ostream& out, const MomentSet& U, const SpatialGrid& xg) {
  out << "x,rho";
  if (U.dim == 1)
    out << ",u";
  else
    for (int d = 0; d < U.dim; ++d) out << ",u" << d;
  out << ",T,E\n";
  const auto u = U.velocity();
  const auto T = U.temperature();
  for (int i = 0; i < U.cells(); ++i) {
    out << format_number(xg.coord(i)) << ',' << format_number(U.rho(i));
    for (int d = 0; d < U.dim; ++d) out << ',' << format_number(u(i, d));
    out << ',' << format_number(T(i)) << ',' << format_number(U.energy(i)) << '\n';
  }
}

/// Per-step diagnostics CSV of a trajectory.
inline void write_diagnostics_csv(std::ostream& out, const Trajectory& tr) {
  out << "step,time,mass,momentum_x,momentum_y,energy,entropy,min_f\n";
  for (const auto& r : tr.records) {
    out << r.step << ',' << format_number(r.time) << ',' << format_number(r.mass) << ','
        << format_number(r.mom_x) << ',' << format_number(r.mom_y) << ','
        << format_number(r.energy) << ',' << format_number(r.entropy) << ','
        << format_number(r.min_f) << '\n';
  }
}

}  // namespace kimex
