#include <gtest/gtest.h>

#include <sstream>

#include "graphs.hpp"
#include "ias/errors.hpp"
#include "ias/graph_io.hpp"
#include "ias/random_graphs.hpp"

using namespace ias;

TEST(GraphIo, EdgeListRoundTrip) {
  Rng rng(9);
  for (int i = 0; i < 20; ++i) {
    GraphSamplerConfig cfg;
    cfg.d = 7;
    cfg.density = Density::dense();
    cfg.mode = i % 2 ? EnvMode::NonExogenous : EnvMode::Exogenous;
    const Dag g = sample_dag(cfg, rng);
    std::stringstream ss;
    write_edge_list(ss, g);
    const Dag back = read_edge_list(ss);
    EXPECT_EQ(back.fingerprint(), g.fingerprint());
    EXPECT_EQ(back.mode(), g.mode());
  }
}

TEST(GraphIo, AdjacencyCsvRoundTrip) {
  const Dag g = ias::testing::figure_right();
  std::stringstream ss;
  write_adjacency_csv(ss, g);
  EXPECT_EQ(read_adjacency_csv(ss).fingerprint(), g.fingerprint());
}

TEST(GraphIo, ParsesDirectivesAndComments) {
  std::istringstream in("# d=5\n# a comment\nE X1\n\nX1 Y\n");
  const Dag g = read_edge_list(in);
  EXPECT_EQ(g.d(), 5);
  EXPECT_EQ(g.edge_count(), 2u);
}

TEST(GraphIo, RejectsMalformedInput) {
  std::istringstream bad_node("E Z1\n");
  EXPECT_THROW(read_edge_list(bad_node), ParseError);
  std::istringstream bad_line("E\n");
  EXPECT_THROW(read_edge_list(bad_line), ParseError);
  EXPECT_THROW(parse_node_name("X0", 3), ParseError);
  EXPECT_EQ(parse_node_name("Y", 3).index, 4u);
}
