#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "gcalc/csv.hpp"
#include "gcalc/sigio.hpp"
#include "oracles.hpp"

using namespace gcalc;

TEST_CASE("generate samples expressions") {
  const auto chirp = generate(parse("sin(2*pi*(x^3/3+x^2+x))"), 0.0, 0.01, 301);
  CHECK(chirp.size() == 301);
  CHECK(chirp.x(300) == 3.0);
  for (const auto& v : chirp.samples) CHECK(v.imag() == 0.0);

  const auto wave = generate(parse("2*e^(-i*(x^4/4+x^2))"), -2.0, 0.01, 401);
  for (const auto& v : wave.samples) CHECK(std::abs(std::abs(v) - 2.0) < 1e-14);

  const auto c = generate(parse("4.5"), 1.0, 0.5, 4);
  for (const auto& v : c.samples) CHECK(v == cplx(4.5));

  try {
    generate(parse("1/(x-1)"), 0.0, 0.5, 4);
    FAIL("expected EvalError");
  } catch (const EvalError& e) {
    CHECK(std::string(e.what()).find("sample 2") != std::string::npos);
  }
  CHECK_THROWS_AS(generate(parse("x"), 0, 0, 3), std::invalid_argument);
  CHECK_THROWS_AS(generate(parse("x"), 0, 1, 0), std::invalid_argument);
  CHECK(generate(parse("x^2"), -1, 0.1, 7) == generate(parse("x^2"), -1, 0.1, 7));
}

TEST_CASE("csv round trip is exact") {
  for (int k = 0; k < 100; ++k) {
    std::vector<cplx> v(static_cast<std::size_t>(oracle::uniform_int(2, 40)));
    for (auto& z : v) z = {oracle::uniform(-1e3, 1e3), oracle::uniform(-1, 1) * std::pow(10.0, oracle::uniform_int(-300, 300))};
    const SampledSignal s(oracle::uniform(-5, 5), std::pow(2.0, -oracle::uniform_int(0, 10)), v);
    std::stringstream io;
    write_csv(s, io);
    const SampledSignal r = read_csv(io);
    CHECK(r.samples == s.samples);
    CHECK(std::abs(r.x0 - s.x0) == 0.0);
    CHECK(std::abs(r.dx - s.dx) <= 1e-12 * s.dx);
  }
}

TEST_CASE("csv reader validation") {
  std::stringstream two("x,re\n0,1\n0.5,2\n1,3\n");
  const auto s = read_csv(two);
  CHECK(s.size() == 3);
  for (const auto& v : s.samples) CHECK(v.imag() == 0.0);

  std::stringstream jitter("x,re,im\n0,1,0\n0.5,2,0\n1.01,3,0\n1.5,3,0\n");
  CHECK_THROWS_AS(read_csv(jitter), GridError);

  std::stringstream bad("x,re,im\n0,1,0\n0.5,oops,0\n");
  try {
    read_csv(bad);
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(e.line() == 3);
  }
  std::stringstream fields("x,re,im\n0,1\n");
  CHECK_THROWS_AS(read_csv(fields), IoError);
  std::stringstream header("t,y\n0,1\n");
  CHECK_THROWS_AS(read_csv(header), IoError);
  std::stringstream one("x,re\n0,1\n");
  CHECK_THROWS_AS(read_csv(one), IoError);
  CHECK_THROWS_AS(read_csv(std::filesystem::path("/nonexistent/file.csv")), IoError);
}

TEST_CASE("trace writers use the documented headers") {
  InstParamTrace t;
  t.grid = {0, 1};
  t.values = {cplx(1, 2), cplx(3, 4)};
  t.est_error = {0.5, 0.25};
  t.mark_hole(1);
  std::stringstream a;
  write_csv(t, a);
  CHECK(a.str() == "x,re,im,err,hole\n0,1,2,0.5,0\n1,nan,nan,nan,1\n");

  FrequencyTrace f;
  f.grid = {0, 0.5};
  f.omega = {1, 2};
  std::stringstream b;
  write_csv(f, b);
  CHECK(b.str() == "x,omega,hole\n0,1,0\n0.5,2,0\n");

  AmplitudeSpectrum sp;
  sp.bin_centers = {0, 0.1};
  sp.values = {std::nullopt, 2.5};
  std::stringstream c;
  write_csv(sp, c);
  CHECK(c.str() == "omega,F\n0,nan\n0.1,2.5\n");

  Spectrogram sg;
  sg.times = {0};
  sg.freqs = {0, 1};
  sg.magnitudes = {{0.5, 0.25}};
  std::stringstream d;
  write_csv(sg, d);
  CHECK(d.str() == "x,omega,mag\n0,0,0.5\n0,1,0.25\n");

  Spectrum s{{0, 1}, {cplx(1, -1), cplx(0, 2)}};
  std::stringstream e;
  write_csv(s, e);
  CHECK(e.str() == "omega,re,im\n0,1,-1\n1,0,2\n");
}
