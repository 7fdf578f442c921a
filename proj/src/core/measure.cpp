#include "core/measure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "core/error.hpp"
#include "core/util.hpp"

namespace cms {
namespace {

void check_particle(const System& sys, const Particle& p, std::size_t idx) {
  auto where = [&] { return " (particle " + std::to_string(idx) + ")"; };
  if (p.vertex < 1 || p.vertex > sys.graph().vertex_count())
    fail(ErrorCode::InvalidArgument, "vertex tag out of range" + where());
  if (!(p.weight >= 0.0) || !std::isfinite(p.weight))
    fail(ErrorCode::InvalidArgument, "weights must be finite and nonnegative" + where());
  if (sys.is_euclid()) {
    if (p.point.kind != Point::Kind::Euclid ||
        static_cast<int>(p.point.coords.size()) != sys.backend().dim)
      fail(ErrorCode::InvalidArgument, "point representation mismatch" + where());
    for (double c : p.point.coords)
      if (!std::isfinite(c)) fail(ErrorCode::InvalidArgument, "non-finite coordinate" + where());
  } else {
    if (p.point.kind != Point::Kind::Word || p.point.symbols.empty() ||
        static_cast<int>(p.point.symbols.size()) > sys.backend().word_capacity)
      fail(ErrorCode::InvalidArgument, "point representation mismatch" + where());
  }
  if (!region_contains(sys, p.vertex, p.point))
    fail(ErrorCode::InvalidArgument, "vertex tag does not match the point's region" + where());
}

}  // namespace

ParticleMeasure ParticleMeasure::from_base_points(const System& sys) {
  const int n = sys.graph().vertex_count();
  std::vector<Particle> ps;
  ps.reserve(static_cast<std::size_t>(n));
  for (int v = 1; v <= n; ++v) ps.push_back({sys.base_point(v), v, 1.0 / n});
  return from_particles(sys, std::move(ps));
}

ParticleMeasure ParticleMeasure::from_particles(const System& sys,
                                                std::vector<Particle> particles) {
  if (particles.empty()) fail(ErrorCode::InvalidArgument, "measure needs at least one particle");
  ParticleMeasure m;
  m.particles_ = std::move(particles);
  m.cumulative_.resize(m.particles_.size());
  KahanSum total;
  double running = 0.0;
  for (std::size_t i = 0; i < m.particles_.size(); ++i) {
    check_particle(sys, m.particles_[i], i);
    total.add(m.particles_[i].weight);
    running += m.particles_[i].weight;
    m.cumulative_[i] = running;
  }
  if (std::abs(total.value() - 1.0) > kWeightTolerance)
    fail(ErrorCode::InvalidArgument,
         "weights must sum to 1 (got " + format_double(total.value()) + ")");
  m.total_ = running;
  return m;
}

std::size_t ParticleMeasure::index_for_unit(double u) const {
  double target = u * total_;
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  if (it == cumulative_.end()) --it;  // u ~ 1 rounding
  return static_cast<std::size_t>(it - cumulative_.begin());
}

void ParticleMeasure::write_csv(const System& sys, const std::string& path) const {
  std::ostringstream out;
  if (sys.is_euclid()) {
    out << "vertex,weight";
    for (int j = 0; j < sys.backend().dim; ++j) out << ",c" << j;
    out << "\n";
    for (const Particle& p : particles_) {
      out << p.vertex << ',' << format_double(p.weight);
      for (double c : p.point.coords) out << ',' << format_double(c);
      out << "\n";
    }
  } else {
    out << "vertex,weight,word\n";
    for (const Particle& p : particles_)
      out << p.vertex << ',' << format_double(p.weight) << ',' << format_word(p.point.symbols)
          << "\n";
  }
  write_text_file(path, out.str());
}

ParticleMeasure ParticleMeasure::read_csv(const System& sys, const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::ParseError, "empty measure file: " + path);

  auto split = [](const std::string& s) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t pos = s.find(',', start);
      fields.push_back(s.substr(start, pos == std::string::npos ? pos : pos - start));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    return fields;
  };

  const std::size_t expect =
      sys.is_euclid() ? 2 + static_cast<std::size_t>(sys.backend().dim) : 3;
  std::vector<Particle> ps;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split(line);
    if (fields.size() != expect)
      fail(ErrorCode::ParseError,
           path + ":" + std::to_string(lineno) + ": expected " + std::to_string(expect) +
               " fields, got " + std::to_string(fields.size()));
    try {
      Particle p;
      p.vertex = std::stoi(fields[0]);
      p.weight = std::stod(fields[1]);
      if (sys.is_euclid()) {
        std::vector<double> coords;
        for (std::size_t j = 2; j < fields.size(); ++j) coords.push_back(std::stod(fields[j]));
        p.point = Point::euclid(std::move(coords));
      } else {
        p.point = Point::word(parse_word(fields[2]));
      }
      ps.push_back(std::move(p));
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      fail(ErrorCode::ParseError, path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return from_particles(sys, std::move(ps));
}

double moment_about_bases(const System& sys, const ParticleMeasure& m) {
  double acc = 0.0;
  for (const Particle& p : m.particles())
    acc += p.weight * distance(p.point, sys.base_point(p.vertex));
  return acc;
}

}  // namespace cms
