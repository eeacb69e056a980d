#include <cstdlib>
#include <string>

#include "doctest.h"
#include "helpers.hpp"
#include "sppa/textio.hpp"

#ifndef SPPA_BIN
#error "SPPA_BIN must point at the sppa executable"
#endif

namespace {

using test_util::TempDir;
using test_util::read_text;
using test_util::write_text;

struct RunResult {
  int status = -1;
  std::string out;
  std::string err;
};

RunResult run(const TempDir& dir, const std::string& args) {
  const std::string out_path = dir.file("_stdout");
  const std::string err_path = dir.file("_stderr");
  const std::string cmd = "cd '" + dir.path().string() + "' && '" SPPA_BIN "' " + args + " > '" +
                          out_path + "' 2> '" + err_path + "'";
  const int rc = std::system(cmd.c_str());
  RunResult r;
  r.status = WEXITSTATUS(rc);
  r.out = read_text(out_path);
  r.err = read_text(err_path);
  return r;
}

}  // namespace

TEST_CASE("missing required flag exits 1 with usage text") {
  TempDir dir("cli_usage");
  const RunResult r = run(dir, "split --out s.csv");
  CHECK(r.status == 1);
  CHECK(!r.err.empty());
}

TEST_CASE("unknown subcommand exits 1") {
  TempDir dir("cli_unknown");
  CHECK(run(dir, "frobnicate").status == 1);
}

TEST_CASE("malformed input exits 2 and names the file and line") {
  TempDir dir("cli_data");
  write_text(dir.file("bad.csv"), "id,x,y,category\n1,0,0,lake\n2,NaN,0,bay\n");
  const RunResult r = run(dir, "ingest --in bad.csv --out clean.csv");
  CHECK(r.status == 2);
  CHECK(r.err.find("bad.csv:3") != std::string::npos);
}

TEST_CASE("ingest prints per-category counts and exits 0") {
  TempDir dir("cli_ingest");
  write_text(dir.file("pts.csv"),
             "id,x,y,category\n1,0,0,lake\n2,1,0,lake\n3,0,1,bay\n");
  const RunResult r = run(dir, "ingest --in pts.csv --out clean.csv");
  CHECK(r.status == 0);
  CHECK(r.out.find("lake") != std::string::npos);
  CHECK(r.out.find("2") != std::string::npos);
  CHECK(read_text(dir.file("clean.csv")).substr(0, 16) == "id,x,y,category\n");
  // manifest written beside the output
  const std::string manifest = read_text(dir.file("clean.csv.manifest"));
  CHECK(manifest.find("command=ingest") != std::string::npos);
  CHECK(manifest.find("input.dataset=pts.csv") != std::string::npos);
}

TEST_CASE("fuse-fit on a corner-perfect visual table writes corner weights") {
  TempDir dir("cli_fusefit");
  // four points, two categories; visual table one-hot on truth
  write_text(dir.file("pts.csv"),
             "id,x,y,category\n1,0,0,a\n2,1,0,b\n3,0,1,a\n4,1,1,b\n");
  write_text(dir.file("s.csv"), "id,split\n1,val\n2,val\n3,val\n4,val\n");
  write_text(dir.file("vis.csv"), "id,p_0,p_1\n1,1,0\n2,0,1\n3,1,0\n4,0,1\n");
  write_text(dir.file("p1.csv"), "id,p_0,p_1\n1,0.5,0.5\n2,0.5,0.5\n3,0.5,0.5\n4,0.5,0.5\n");
  write_text(dir.file("p2.csv"), "id,p_0,p_1\n1,0.5,0.5\n2,0.5,0.5\n3,0.5,0.5\n4,0.5,0.5\n");
  const RunResult r = run(dir,
                          "fuse-fit --visual vis.csv --first p1.csv --second p2.csv "
                          "--dataset pts.csv --split s.csv --subset val --step 0.25 "
                          "--out w.txt --report-out rep.txt");
  CHECK(r.status == 0);
  CHECK(read_text(dir.file("w.txt")) == "w_vis=1 w_1st=0 w_2nd=0\n");
  CHECK(read_text(dir.file("rep.txt")).find("fused (winner)      1.000") != std::string::npos);
}

TEST_CASE("evaluate on predictions equal to truth reports accuracy 1.000") {
  TempDir dir("cli_eval");
  write_text(dir.file("pts.csv"),
             "id,x,y,category\n1,0,0,a\n2,1,0,b\n3,0,1,a\n4,1,1,b\n");
  write_text(dir.file("probs.csv"), "id,p_0,p_1\n1,1,0\n2,0,1\n3,1,0\n4,0,1\n");
  const RunResult r = run(dir, "evaluate --probs probs.csv --dataset pts.csv");
  CHECK(r.status == 0);
  CHECK(r.out.find("accuracy  1.000") != std::string::npos);
}

TEST_CASE("csr preset plus lclq reports mean quotients near one") {
  TempDir dir("cli_csr");
  REQUIRE(run(dir, "synth --preset csr --n 800 --seed 7 --out pts.csv").status == 0);
  const RunResult r = run(dir, "lclq --dataset pts.csv --h 0.05 --out v.csv");
  CHECK(r.status == 0);
  // every reported per-category mean sits in the loose CSR band
  int found = 0;
  std::size_t at = 0;
  while ((at = r.out.find("mean lclq ->", at)) != std::string::npos) {
    std::size_t end = r.out.find('\n', at);
    if (end == std::string::npos) end = r.out.size();
    const std::string line = r.out.substr(at, end - at);
    const double value = std::strtod(line.c_str() + line.find_last_of(' '), nullptr);
    CHECK(value >= 0.9);
    CHECK(value <= 1.1);
    ++found;
    at = end;
  }
  CHECK(found == 3);
}

TEST_CASE("config file supplies flags and command line overrides it") {
  TempDir dir("cli_config");
  write_text(dir.file("pts.csv"),
             "id,x,y,category\n1,0,0,a\n2,1,0,b\n3,0,1,a\n4,1,1,b\n");
  write_text(dir.file("split.cfg"),
             "# settings\ndataset=pts.csv\nout=s1.csv\nfractions=1,0,0\nseed=3\n");
  CHECK(run(dir, "split --config split.cfg").status == 0);
  const std::string s1 = read_text(dir.file("s1.csv"));
  CHECK(s1.find("train") != std::string::npos);
  CHECK(s1.find("test") == std::string::npos);
  // override the output path on the command line
  CHECK(run(dir, "split --config split.cfg --out s2.csv").status == 0);
  CHECK(read_text(dir.file("s2.csv")) == s1);
}

TEST_CASE("heatmap endpoints: constant raster becomes all zeros") {
  TempDir dir("cli_heatmap");
  write_text(dir.file("r.raster"),
             "x0=0\ny0=0\ncell=1\nwidth=2\nheight=1\ncategory=a\ndata\n3.5 3.5\n");
  REQUIRE(run(dir, "heatmap --raster r.raster --out r.pgm --mode pgm8").status == 0);
  const std::string img = read_text(dir.file("r.pgm"));
  const std::string header = "P5\n2 1\n255\n";
  REQUIRE(img.size() == header.size() + 2);
  CHECK(img[header.size()] == 0);
  CHECK(img[header.size() + 1] == 0);
  const std::string sidecar = read_text(dir.file("r.pgm.txt"));
  CHECK(sidecar.find("scale=0") != std::string::npos);
}

TEST_CASE("nonexistent input path is a usage error") {
  TempDir dir("cli_missing");
  CHECK(run(dir, "ingest --in nope.csv --out out.csv").status == 1);
}

TEST_CASE("globalclq writes one signature row per category") {
  TempDir dir("cli_globalclq");
  write_text(dir.file("pts.csv"),
             "id,x,y,category\n1,0,0,a\n2,0.1,0,a\n3,1,1,b\n4,0.9,1,b\n");
  write_text(dir.file("s.csv"), "id,split\n1,train\n2,train\n3,train\n4,train\n");
  const RunResult r =
      run(dir, "globalclq --dataset pts.csv --split s.csv --h 0.5 --out g.csv");
  CHECK(r.status == 0);
  const std::string table = read_text(dir.file("g.csv"));
  CHECK(table.substr(0, 31) == "category,v_0,v_1,n_contributing");
  CHECK(table.find("\na,") != std::string::npos);
  CHECK(table.find("\nb,") != std::string::npos);
  // a category without training points is a data error
  write_text(dir.file("s2.csv"), "id,split\n1,train\n2,train\n3,test\n4,test\n");
  CHECK(run(dir, "globalclq --dataset pts.csv --split s2.csv --h 0.5 --out g2.csv").status == 2);
}

TEST_CASE("version flag prints the tool version") {
  TempDir dir("cli_version");
  const RunResult r = run(dir, "--version");
  CHECK(r.status == 0);
  CHECK(r.out.find("sppa") != std::string::npos);
}
