#include "srdl/io.hpp"

#include "srdl/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace srdl {

namespace {

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw input_error("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw input_error("cannot write " + path);
  return out;
}

uint64_t load_u64le(const unsigned char* p) {
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

void store_u64le(uint64_t v, unsigned char* p) {
  for (int i = 0; i < 8; ++i) {
    p[i] = static_cast<unsigned char>(v & 0xff);
    v >>= 8;
  }
}

std::string strip_json_suffix(const std::string& path) {
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json")
    return path.substr(0, path.size() - 5);
  return path;
}

// ---- native -----------------------------------------------------------

HsiCube load_native(const std::string& path) {
  const std::string base = strip_json_suffix(path);
  const std::string header_path = base + ".json";
  json header;
  try {
    header = json::parse(open_in(header_path));
  } catch (const json::exception& e) {
    throw input_error("malformed header " + header_path + ": " + e.what());
  }
  int h = 0, w = 0, d = 0;
  std::string dtype, order;
  try {
    h = header.at("height").get<int>();
    w = header.at("width").get<int>();
    d = header.at("bands").get<int>();
    dtype = header.at("dtype").get<std::string>();
    order = header.at("order").get<std::string>();
  } catch (const json::exception& e) {
    throw input_error("malformed header " + header_path + ": " + e.what());
  }
  if (dtype != "f64le" || order != "pixel-major") {
    throw input_error(header_path + ": unsupported dtype/order (" + dtype + "/" + order + ")");
  }
  if (h < 2 || w < 2 || d < 1) {
    throw input_error(header_path + ": degenerate dimensions");
  }

  const std::string bin_path = base + ".bin";
  auto in = open_in(bin_path, std::ios::binary);
  in.seekg(0, std::ios::end);
  const auto file_size = static_cast<uint64_t>(in.tellg());
  const uint64_t expect = static_cast<uint64_t>(h) * w * d * 8;
  if (file_size != expect) {
    throw input_error(bin_path + ": size mismatch, header implies " +
                      std::to_string(expect) + " bytes, file has " +
                      std::to_string(file_size));
  }
  in.seekg(0);
  std::vector<unsigned char> raw(expect);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(expect));
  if (!in) throw input_error(bin_path + ": short read");

  HsiCube cube(h, w, d);
  for (size_t i = 0; i < cube.data().size(); ++i) {
    const uint64_t bits = load_u64le(raw.data() + i * 8);
    double v;
    std::memcpy(&v, &bits, 8);
    if (!std::isfinite(v)) {
      throw input_error(bin_path + ": non-finite value at offset " + std::to_string(i));
    }
    cube.data()[i] = v;
  }

  const std::string gt_path = base + ".gt.csv";
  if (fs::exists(gt_path)) {
    cube.set_gt(load_label_csv(gt_path, h, w));
  }
  return cube;
}

// ---- ENVI -------------------------------------------------------------

struct EnviHeader {
  int samples = 0;   // width
  int lines = 0;     // height
  int bands = 0;
  int data_type = 0;
  int byte_order = 0;
  int header_offset = 0;
  std::string interleave;
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  size_t b = s.find_last_not_of(" \t\r\n");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

EnviHeader parse_envi_header(const std::string& path) {
  auto in = open_in(path);
  EnviHeader hdr;
  std::string line;
  bool saw_magic = false;
  while (std::getline(in, line)) {
    if (!saw_magic) {
      if (lower(trim(line)).rfind("envi", 0) == 0) {
        saw_magic = true;
        continue;
      }
      throw input_error(path + ": malformed header, missing ENVI magic line");
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = lower(trim(line.substr(0, eq)));
    std::string value = trim(line.substr(eq + 1));
    // skip multi-line { ... } blocks (band names, map info, ...)
    if (!value.empty() && value.front() == '{' && value.find('}') == std::string::npos) {
      while (std::getline(in, line) && line.find('}') == std::string::npos) {}
      continue;
    }
    try {
      if (key == "samples") hdr.samples = std::stoi(value);
      else if (key == "lines") hdr.lines = std::stoi(value);
      else if (key == "bands") hdr.bands = std::stoi(value);
      else if (key == "data type") hdr.data_type = std::stoi(value);
      else if (key == "byte order") hdr.byte_order = std::stoi(value);
      else if (key == "header offset") hdr.header_offset = std::stoi(value);
      else if (key == "interleave") hdr.interleave = lower(value);
    } catch (const std::exception&) {
      throw input_error(path + ": malformed header field '" + key + "' = '" + value + "'");
    }
  }
  if (hdr.samples <= 0 || hdr.lines <= 0 || hdr.bands <= 0) {
    throw input_error(path + ": malformed header, missing samples/lines/bands");
  }
  if (hdr.interleave != "bsq" && hdr.interleave != "bil" && hdr.interleave != "bip") {
    throw input_error(path + ": unsupported interleave '" + hdr.interleave + "'");
  }
  return hdr;
}

int envi_sample_bytes(int data_type) {
  switch (data_type) {
    case 1: return 1;            // u8
    case 2: case 12: return 2;   // i16 / u16
    case 3: case 13: case 4: return 4;  // i32 / u32 / f32
    case 5: case 14: case 15: return 8; // f64 / i64 / u64
    default:
      throw input_error("unsupported ENVI data type " + std::to_string(data_type));
  }
}

double envi_decode(const unsigned char* p, int data_type, bool big_endian) {
  unsigned char buf[8];
  const int nb = envi_sample_bytes(data_type);
  for (int i = 0; i < nb; ++i) buf[i] = big_endian ? p[nb - 1 - i] : p[i];
  switch (data_type) {
    case 1: return static_cast<double>(buf[0]);
    case 2: { int16_t v; std::memcpy(&v, buf, 2); return v; }
    case 12: { uint16_t v; std::memcpy(&v, buf, 2); return v; }
    case 3: { int32_t v; std::memcpy(&v, buf, 4); return v; }
    case 13: { uint32_t v; std::memcpy(&v, buf, 4); return v; }
    case 4: { float v; std::memcpy(&v, buf, 4); return v; }
    case 5: { double v; std::memcpy(&v, buf, 8); return v; }
    case 14: { int64_t v; std::memcpy(&v, buf, 8); return static_cast<double>(v); }
    case 15: { uint64_t v; std::memcpy(&v, buf, 8); return static_cast<double>(v); }
    default: throw input_error("unsupported ENVI data type");
  }
}

std::pair<std::string, std::string> envi_locate(const std::string& path) {
  const std::string low = lower(path);
  if (low.size() > 4 && low.substr(low.size() - 4) == ".hdr") {
    const std::string stem = path.substr(0, path.size() - 4);
    for (const char* ext : {"", ".img", ".dat", ".raw", ".bsq", ".bil", ".bip"}) {
      if (fs::exists(stem + ext)) return {path, stem + ext};
    }
    throw input_error("no data file found next to " + path);
  }
  for (const std::string& cand :
       {path + ".hdr", fs::path(path).replace_extension(".hdr").string()}) {
    if (fs::exists(cand)) return {cand, path};
  }
  throw input_error("no ENVI header found for " + path);
}

HsiCube load_envi(const std::string& path) {
  const auto [hdr_path, data_path] = envi_locate(path);
  const EnviHeader hdr = parse_envi_header(hdr_path);
  const int nb = envi_sample_bytes(hdr.data_type);
  const int h = hdr.lines, w = hdr.samples, d = hdr.bands;

  auto in = open_in(data_path, std::ios::binary);
  in.seekg(0, std::ios::end);
  const auto file_size = static_cast<uint64_t>(in.tellg());
  const uint64_t expect = static_cast<uint64_t>(h) * w * d * nb + hdr.header_offset;
  if (file_size != expect) {
    throw input_error(data_path + ": size mismatch, header implies " +
                      std::to_string(expect) + " bytes, file has " +
                      std::to_string(file_size));
  }
  std::vector<unsigned char> raw(static_cast<size_t>(file_size) - hdr.header_offset);
  in.seekg(hdr.header_offset);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!in) throw input_error(data_path + ": short read");

  const bool big = hdr.byte_order == 1;
  HsiCube cube(h, w, d);
  const size_t hw = static_cast<size_t>(h) * w;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const size_t pix = static_cast<size_t>(r) * w + c;
      for (int b = 0; b < d; ++b) {
        size_t src;
        if (hdr.interleave == "bsq") src = b * hw + pix;
        else if (hdr.interleave == "bil") src = (static_cast<size_t>(r) * d + b) * w + c;
        else src = pix * d + b; // bip
        const double v = envi_decode(raw.data() + src * nb, hdr.data_type, big);
        if (!std::isfinite(v)) {
          throw input_error(data_path + ": non-finite value at sample offset " +
                            std::to_string(src));
        }
        cube.data()[pix * d + b] = v;
      }
    }
  }
  return cube;
}

// ---- CSV --------------------------------------------------------------

HsiCube load_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw input_error(path + ": empty file");
  int h = 0, w = 0, d = 0;
  {
    std::string dims = line;
    std::replace(dims.begin(), dims.end(), ',', ' ');
    std::istringstream ss(dims);
    if (!(ss >> h >> w >> d)) throw input_error(path + ": malformed dims line '" + line + "'");
  }
  if (h < 2 || w < 2 || d < 1) throw input_error(path + ": degenerate dimensions");
  HsiCube cube(h, w, d);
  size_t idx = 0;
  const size_t total = cube.data().size();
  while (std::getline(in, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double v;
    while (ss >> v) {
      if (idx >= total) throw input_error(path + ": size mismatch, more than " +
                                          std::to_string(total) + " values");
      if (!std::isfinite(v)) {
        throw input_error(path + ": non-finite value at offset " + std::to_string(idx));
      }
      cube.data()[idx++] = v;
    }
  }
  if (idx != total) {
    throw input_error(path + ": size mismatch, got " + std::to_string(idx) +
                      " values, expected " + std::to_string(total));
  }
  return cube;
}

} // namespace

CubeFormat parse_format(const std::string& name) {
  const std::string f = lower(trim(name));
  if (f == "native") return CubeFormat::native;
  if (f == "envi") return CubeFormat::envi;
  if (f == "csv") return CubeFormat::csv;
  throw input_error("unknown cube format '" + name + "' (native|envi|csv)");
}

HsiCube load_cube(const std::string& path, CubeFormat format) {
  HsiCube cube;
  switch (format) {
    case CubeFormat::native: cube = load_native(path); break;
    case CubeFormat::envi: cube = load_envi(path); break;
    case CubeFormat::csv: cube = load_csv(path); break;
  }
  cube.validate(path.c_str());
  return cube;
}

void save_cube(const HsiCube& cube, const std::string& path) {
  cube.validate("save_cube");
  const std::string base = strip_json_suffix(path);

  json header = {{"height", cube.height()},
                 {"width", cube.width()},
                 {"bands", cube.bands()},
                 {"dtype", "f64le"},
                 {"order", "pixel-major"}};
  open_out(base + ".json") << header.dump(2) << "\n";

  auto out = open_out(base + ".bin", std::ios::binary);
  std::vector<unsigned char> raw(cube.data().size() * 8);
  for (size_t i = 0; i < cube.data().size(); ++i) {
    uint64_t bits;
    std::memcpy(&bits, &cube.data()[i], 8);
    store_u64le(bits, raw.data() + i * 8);
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw input_error("short write to " + base + ".bin");

  if (cube.has_gt()) {
    save_label_csv(cube.gt(), cube.height(), cube.width(), base + ".gt.csv");
  }
}

std::vector<int> load_label_csv(const std::string& path, int height, int width) {
  auto in = open_in(path);
  std::vector<int> labels;
  labels.reserve(static_cast<size_t>(height) * width);
  std::string line;
  while (std::getline(in, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    int v;
    while (ss >> v) labels.push_back(v);
  }
  if (labels.size() != static_cast<size_t>(height) * width) {
    throw input_error(path + ": expected " + std::to_string(height * width) +
                      " labels, got " + std::to_string(labels.size()));
  }
  return labels;
}

std::vector<int> load_label_grid(const std::string& path, int* height, int* width) {
  auto in = open_in(path);
  std::vector<int> labels;
  std::string line;
  int rows = 0, cols = -1;
  while (std::getline(in, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    int v, count = 0;
    while (ss >> v) {
      labels.push_back(v);
      ++count;
    }
    if (count == 0) continue; // blank line
    if (cols < 0) {
      cols = count;
    } else if (count != cols) {
      throw input_error(path + ": ragged label grid, line with " +
                        std::to_string(count) + " values after " +
                        std::to_string(cols) + "-wide rows");
    }
    ++rows;
  }
  if (rows == 0) throw input_error(path + ": empty label grid");
  *height = rows;
  *width = cols;
  return labels;
}

void save_label_csv(const std::vector<int>& labels, int height, int width,
                    const std::string& path) {
  if (labels.size() != static_cast<size_t>(height) * width) {
    throw input_error("label grid size mismatch writing " + path);
  }
  auto out = open_out(path);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      if (c) out << ',';
      out << labels[r * width + c];
    }
    out << '\n';
  }
}

namespace {

int pnm_next_int(std::istream& in) {
  // whitespace and '#' comments per the PNM grammar
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {}
    } else if (!std::isspace(c)) {
      break;
    }
  }
  if (c == EOF) throw input_error("truncated PNM header");
  int v = 0;
  bool any = false;
  while (c != EOF && std::isdigit(c)) {
    v = v * 10 + (c - '0');
    any = true;
    c = in.get();
  }
  if (!any) throw input_error("malformed PNM header");
  return v;
}

} // namespace

std::vector<int> load_label_pgm(const std::string& path, int* height, int* width) {
  auto in = open_in(path, std::ios::binary);
  char magic[2];
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || magic[1] != '5') {
    throw input_error(path + ": not a binary PGM (P5) file");
  }
  const int w = pnm_next_int(in);
  const int h = pnm_next_int(in);
  const int maxval = pnm_next_int(in);
  if (maxval <= 0 || maxval > 65535) throw input_error(path + ": bad PGM maxval");
  const int bytes = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(static_cast<size_t>(w) * h * bytes);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!in) throw input_error(path + ": truncated PGM payload");
  std::vector<int> labels(static_cast<size_t>(w) * h);
  for (size_t i = 0; i < labels.size(); ++i) {
    labels[i] = bytes == 2 ? (raw[2 * i] << 8) | raw[2 * i + 1] : raw[i];
  }
  if (height) *height = h;
  if (width) *width = w;
  return labels;
}

void save_label_pgm(const std::vector<int>& labels, int height, int width,
                    const std::string& path) {
  if (labels.size() != static_cast<size_t>(height) * width) {
    throw input_error("label grid size mismatch writing " + path);
  }
  for (int v : labels) {
    if (v < 0 || v > 65535) {
      throw input_error("label " + std::to_string(v) + " out of 16-bit PGM range");
    }
  }
  auto out = open_out(path, std::ios::binary);
  out << "P5\n" << width << " " << height << "\n65535\n";
  std::vector<unsigned char> raw(labels.size() * 2);
  for (size_t i = 0; i < labels.size(); ++i) {
    raw[2 * i] = static_cast<unsigned char>(labels[i] >> 8);
    raw[2 * i + 1] = static_cast<unsigned char>(labels[i] & 0xff);
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

void save_ppm(const std::vector<uint8_t>& rgb, int height, int width,
              const std::string& path) {
  if (rgb.size() != static_cast<size_t>(height) * width * 3) {
    throw input_error("rgb buffer size mismatch writing " + path);
  }
  auto out = open_out(path, std::ios::binary);
  out << "P6\n" << width << " " << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
}

uint64_t fnv1a_bytes(const void* data, size_t len, uint64_t hash) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < len; ++i) {
    hash ^= bytes[i];
    hash *= 1099511628211ull;
  }
  return hash;
}

uint64_t fnv1a_file(const std::string& path) {
  auto in = open_in(path, std::ios::binary);
  uint64_t hash = 14695981039346656037ull;
  char buf[65536];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    hash = fnv1a_bytes(buf, static_cast<size_t>(in.gcount()), hash);
    if (!in) break;
  }
  return hash;
}

} // namespace srdl
