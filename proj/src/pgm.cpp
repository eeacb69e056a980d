#include "sppa/pgm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sppa/textio.hpp"

namespace sppa {

PgmMode pgm_mode_from_name(std::string_view name) {
  if (name == "pgm8") return PgmMode::pgm8;
  if (name == "pgm16") return PgmMode::pgm16;
  throw std::invalid_argument("unknown pgm mode: " + std::string(name));
}

std::string_view pgm_mode_name(PgmMode mode) {
  return mode == PgmMode::pgm8 ? "pgm8" : "pgm16";
}

namespace {

struct Scale {
  double min = 0.0;
  double max = 0.0;
  double factor = 0.0;  // maxval / (max - min), 0 for a constant raster
};

Scale raster_scale(const Raster& r, long maxval) {
  Scale s;
  s.min = *std::min_element(r.values.begin(), r.values.end());
  s.max = *std::max_element(r.values.begin(), r.values.end());
  if (s.max > s.min) s.factor = static_cast<double>(maxval) / (s.max - s.min);
  return s;
}

}  // namespace

std::string render_pgm(const Raster& raster, PgmMode mode) {
  raster.grid.validate();
  if (raster.values.size() != static_cast<std::size_t>(raster.grid.width) * raster.grid.height)
    throw std::invalid_argument("raster value count does not match its grid");
  const long maxval = mode == PgmMode::pgm8 ? 255 : 65535;
  const Scale s = raster_scale(raster, maxval);

  std::string out = "P5\n" + std::to_string(raster.grid.width) + " " +
                    std::to_string(raster.grid.height) + "\n" + std::to_string(maxval) + "\n";
  out.reserve(out.size() +
              raster.values.size() * (mode == PgmMode::pgm8 ? 1 : 2));
  for (int iy = raster.grid.height - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < raster.grid.width; ++ix) {
      const double v = raster.at(ix, iy);
      long q = s.factor == 0.0 ? 0 : std::lround((v - s.min) * s.factor);
      q = std::clamp(q, 0L, maxval);
      if (mode == PgmMode::pgm8) {
        out.push_back(static_cast<char>(q));
      } else {
        out.push_back(static_cast<char>((q >> 8) & 0xFF));
        out.push_back(static_cast<char>(q & 0xFF));
      }
    }
  }
  return out;
}

std::string render_pgm_sidecar(const Raster& raster, PgmMode mode) {
  const long maxval = mode == PgmMode::pgm8 ? 255 : 65535;
  const Scale s = raster_scale(raster, maxval);
  KeyValues kv{
      {"mode", std::string(pgm_mode_name(mode))},
      {"maxval", std::to_string(maxval)},
      {"x0", format_double(raster.grid.x0)},
      {"y0", format_double(raster.grid.y0)},
      {"cell", format_double(raster.grid.cell)},
      {"width", std::to_string(raster.grid.width)},
      {"height", std::to_string(raster.grid.height)},
      {"category", raster.category_name},
      {"min", format_double(s.min)},
      {"max", format_double(s.max)},
      {"scale", format_double(s.factor)},
  };
  return render_key_values(kv);
}

void write_pgm_with_sidecar(const std::filesystem::path& path, const Raster& raster,
                            PgmMode mode) {
  atomic_write_file(path, render_pgm(raster, mode));
  atomic_write_file(path.string() + ".txt", render_pgm_sidecar(raster, mode));
}

std::string render_raster_text(const Raster& raster) {
  std::string out;
  out += "x0=" + format_double(raster.grid.x0) + "\n";
  out += "y0=" + format_double(raster.grid.y0) + "\n";
  out += "cell=" + format_double(raster.grid.cell) + "\n";
  out += "width=" + std::to_string(raster.grid.width) + "\n";
  out += "height=" + std::to_string(raster.grid.height) + "\n";
  out += "category=" + raster.category_name + "\n";
  out += "data\n";
  for (int iy = 0; iy < raster.grid.height; ++iy) {
    for (int ix = 0; ix < raster.grid.width; ++ix) {
      if (ix) out += ' ';
      out += format_double(raster.at(ix, iy));
    }
    out += '\n';
  }
  return out;
}

Raster parse_raster_text(std::string_view text, std::string_view source_name) {
  const std::size_t data_at = text.find("data\n");
  if (data_at == std::string_view::npos) throw DataError("missing data section", std::string(source_name));
  const KeyValues kv = parse_key_values(text.substr(0, data_at), source_name);
  Raster r;
  r.grid.x0 = parse_double(find_key(kv, "x0"));
  r.grid.y0 = parse_double(find_key(kv, "y0"));
  r.grid.cell = parse_double(find_key(kv, "cell"));
  r.grid.width = static_cast<int>(parse_int(find_key(kv, "width")));
  r.grid.height = static_cast<int>(parse_int(find_key(kv, "height")));
  r.category_name = std::string(find_key(kv, "category"));
  r.grid.validate();
  r.values.reserve(static_cast<std::size_t>(r.grid.width) * r.grid.height);

  std::string_view rest = text.substr(data_at + 5);
  std::size_t at = 0;
  while (at < rest.size()) {
    std::size_t end = rest.find('\n', at);
    if (end == std::string_view::npos) end = rest.size();
    std::string_view line = rest.substr(at, end - at);
    at = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::size_t f = 0;
    while (f < line.size()) {
      std::size_t sp = line.find(' ', f);
      if (sp == std::string_view::npos) sp = line.size();
      if (sp > f) r.values.push_back(parse_double(line.substr(f, sp - f)));
      f = sp + 1;
    }
  }
  if (r.values.size() != static_cast<std::size_t>(r.grid.width) * r.grid.height)
    throw DataError("value count does not match width*height", std::string(source_name));
  return r;
}

}  // namespace sppa
