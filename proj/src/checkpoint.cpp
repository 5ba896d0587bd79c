#include "hqvmc/checkpoint.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hqvmc {

namespace {

void write_doubles(std::ostream& os, const char* tag, const std::vector<double>& v) {
  os << tag << " " << v.size() << "\n";
  os << std::hexfloat;
  for (double x : v) os << x << "\n";
  os << std::defaultfloat;
}

double read_double(std::istream& in, const std::string& path) {
  std::string tok;
  if (!(in >> tok)) throw std::runtime_error(path + ": truncated checkpoint");
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size()) throw std::runtime_error(path + ": bad number '" + tok + "'");
  return v;
}

void expect(std::istream& in, const std::string& word, const std::string& path) {
  std::string tok;
  if (!(in >> tok) || tok != word) {
    throw std::runtime_error(path + ": expected '" + word + "' in checkpoint, got '" + tok + "'");
  }
}

std::vector<double> read_doubles(std::istream& in, const std::string& tag, const std::string& path) {
  expect(in, tag, path);
  std::size_t n = 0;
  if (!(in >> n)) throw std::runtime_error(path + ": bad length for " + tag);
  std::vector<double> v(n);
  for (auto& x : v) x = read_double(in, path);
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& c) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp);
    if (!os) throw std::runtime_error("cannot write checkpoint " + path);
    os << "hqvmc-checkpoint " << c.version << "\n";
    os << "iteration " << c.iteration << "\n";
    os << "layout_checksum " << std::hex << c.layout_checksum << std::dec << "\n";
    os << "optimizer " << to_string(c.optimizer) << "\n";
    for (int b = 0; b < kNumBlocks; ++b) {
      const auto& r = c.blocks[static_cast<std::size_t>(b)];
      os << "block " << to_string(static_cast<Block>(b)) << " " << r.offset << " " << r.size << "\n";
    }
    write_doubles(os, "params", c.params);
    os << "adam_step " << c.adam.step << "\n" << std::hexfloat;
    os << "adam_hyper " << c.adam.beta1 << " " << c.adam.beta2 << " " << c.adam.epsilon << "\n";
    os << std::defaultfloat;
    write_doubles(os, "adam_m", c.adam.m);
    write_doubles(os, "adam_v", c.adam.v);
    os << "config_begin\n" << c.config_text;
    if (!c.config_text.empty() && c.config_text.back() != '\n') os << "\n";
    os << "config_end\n";
    if (!os) throw std::runtime_error("failed writing checkpoint " + path);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw std::runtime_error("cannot move checkpoint into " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path);
  Checkpoint c;
  expect(in, "hqvmc-checkpoint", path);
  in >> c.version;
  if (c.version != kCheckpointVersion) {
    throw std::runtime_error(path + ": unsupported checkpoint version " + std::to_string(c.version));
  }
  expect(in, "iteration", path);
  in >> c.iteration;
  expect(in, "layout_checksum", path);
  in >> std::hex >> c.layout_checksum >> std::dec;
  expect(in, "optimizer", path);
  std::string method;
  in >> method;
  c.optimizer = parse_method(method);
  for (int b = 0; b < kNumBlocks; ++b) {
    expect(in, "block", path);
    std::string name;
    in >> name;
    if (parse_block(name) != static_cast<Block>(b)) throw std::runtime_error(path + ": blocks out of order");
    auto& r = c.blocks[static_cast<std::size_t>(b)];
    in >> r.offset >> r.size;
  }
  c.params = read_doubles(in, "params", path);
  expect(in, "adam_step", path);
  in >> c.adam.step;
  expect(in, "adam_hyper", path);
  c.adam.beta1 = read_double(in, path);
  c.adam.beta2 = read_double(in, path);
  c.adam.epsilon = read_double(in, path);
  c.adam.m = read_doubles(in, "adam_m", path);
  c.adam.v = read_doubles(in, "adam_v", path);
  expect(in, "config_begin", path);
  std::string line;
  std::getline(in, line);
  std::ostringstream cfg;
  bool closed = false;
  while (std::getline(in, line)) {
    if (line == "config_end") {
      closed = true;
      break;
    }
    cfg << line << "\n";
  }
  if (!closed) throw std::runtime_error(path + ": unterminated config section");
  c.config_text = cfg.str();
  if (!in.good() && !in.eof()) throw std::runtime_error(path + ": malformed checkpoint");
  return c;
}

void restore_blocks(const Checkpoint& ckpt, const HybridWavefunction& wf, std::vector<double>& w, BlockSet blocks) {
  if (w.size() != wf.num_params()) throw std::invalid_argument("restore_blocks: parameter vector has the wrong length");
  for (int b = 0; b < kNumBlocks; ++b) {
    if (!blocks.contains(static_cast<Block>(b))) continue;
    const BlockRange src = ckpt.blocks[static_cast<std::size_t>(b)];
    const BlockRange dst = wf.block(static_cast<Block>(b));
    if (src.size != dst.size) {
      throw std::runtime_error("checkpoint block " + to_string(static_cast<Block>(b)) + " has " +
                               std::to_string(src.size) + " parameters, expected " + std::to_string(dst.size));
    }
    if (src.offset + src.size > ckpt.params.size()) throw std::runtime_error("checkpoint block exceeds parameter data");
    for (std::size_t i = 0; i < src.size; ++i) w[dst.offset + i] = ckpt.params[src.offset + i];
  }
}

}  // namespace hqvmc
