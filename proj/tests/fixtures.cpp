#include "fixtures.hpp"

#include <filesystem>
#include <random>

#include "compsim/errors.hpp"

namespace compsim::testfix {

namespace {

const char* kText0 = R"(The harbor wakes before the town does. Long before the first shutters
open along the high street, the fishing boats slip their moorings and
move out past the breakwater, their engines low and patient in the grey
morning water. The men on deck drink their coffee from dented tin mugs
and watch the weather line on the horizon, reading the wind the way
their fathers read it, by the colour of the water and the way the gulls
hang above the channel. By the time the sun clears the headland the
market stalls on the quay are already set: crates of silver fish on
crushed ice, coils of rope, boxes of salted bread from the bakery on
the corner. The stone of the quay is dark with spray and old diesel,
worn smooth by a hundred years of boots and barrows. Traders call their
prices into the morning air and the sound carries across the harbor to
the houses stacked on the hill, where lights come on one by one and the
smell of coffee drifts out through half-open windows. It is a small
town and it keeps a small town's hours, but the water gives it a kind
of seriousness. Everything here arrives by water or leaves by it, and
the tide table pinned by the harbor office door is consulted more often
than any newspaper. When the wind swings to the northeast the boats
stay in and the men mend nets in the sheds, and the town goes quiet as
if holding its breath, waiting for the weather to turn and the water to
open again. The children learn the names of the boats before they learn
the names of the streets, and the old men on the bench by the seawall
can tell from the engine note alone which boat is coming home early and
what that probably means about the catch, the weather, or the luck of
the crew. Nothing about the harbor is hurried and nothing about it is
idle either; the work has its own tide, rising and falling with the
light, and the town rises and falls with it as it has always done.)";

const char* kText1 = R"(In winter the light comes late and leaves early, and the town closes
around its harbor like a hand around a match. The morning boats go out
in the dark and come back in the dark, and in the short grey middle of
the day the quay belongs to the gulls and to the women from the fish
sheds, who cross the stones in their rubber aprons carrying trays of
herring through the cold. The market shrinks to a single row of stalls
under the arcade, selling winter bread and smoked fish and hot coffee
poured from battered urns, and the talk at the stalls is all weather,
wind from the north, ice on the inner channel, the tide running hard
against the breakwater. The houses on the hill keep their lamps lit all
day. Smoke stands up straight from the chimneys in the still cold and
lies flat along the rooftops when the wind rises, and the children go
to school along the seawall with their hoods up, leaning into the gusts
and counting the boats still out. The harbor office posts the gale
warnings on its door, and the old men read them slowly, twice, and look
at the water and say that it was worse in the year of the great storm,
when the sea came over the wall and left a fishing boat sitting in the
middle of the high street like a toy set down by a tired child. Winter
is the season of repair. Nets are mended, hulls are painted, engines are
taken apart on the shed floors and put back together better, and in the
long evenings the lighted windows of the pubs along the quay hold the
whole town, the fishermen and the bakers and the harbormaster, all of
them waiting out the dark months with cards and coffee and slow talk,
while outside the tide keeps its old appointments with the stone, and
the moored boats knock their fenders softly against the quay all night
like patient animals stabled against the weather and the long dark.)";

const char* kText2 = R"(The bakery on the corner of the high street opens at five, and its
light is often the first in the town after the harbor office. The baker
and his daughter work the ovens through the early hours, and by the
time the fishing boats clear the breakwater the first bread is already
cooling on the racks by the window. People shape their mornings around
that window. The crews buy loaves on their way down to the water, the
schoolteacher buys rolls on her way up the hill, and the harbormaster,
who claims he only comes for the weather talk, leaves every morning
with the same two currant buns he has bought for thirty years. The
bakery keeps the town's memory in its ledgers, births and weddings
written in orders for cakes, hard winters written in the quiet columns
where the fancy bread drops out and only the plain loaves remain. On
market days the smell of the ovens crosses the street and mixes with
the salt coming off the quay, bread and fish and coffee together, which
is as near as the town comes to a signature. In the afternoon the
baker's daughter carries the unsold loaves down to the sheds where the
nets are mended, and trades them for a box of whatever the morning
brought in, and this arrangement appears in no ledger at all, being
older than money and more reliable. When the storm closed the harbor
for nine days one February the bakery stayed open on credit the whole
time, and when the boats finally went out again the first catch landed
on the quay was carried, all of it, up the high street to the corner as
payment and as thanks. The baker waved it away and then took one fish
for his supper, and the rest went to the market at a price so low the
whole town ate well, and that too was written nowhere and remembered by
everyone. A town is held together by bread and weather and debts of
this kind, the sort that are never called in and never quite settled,
passing back and forth along the street with the morning light.)";

const char* kText3 = R"(Summer brings the visitors, and the town wears them the way the quay
wears its coat of gulls, tolerantly and with an eye on the weather. The
morning boats still go out, but now there are sailing dinghies in the
channel and children swimming off the steps inside the breakwater, and
the market on the quay doubles in length, the fish stalls joined by
stalls of postcards and striped cloth and jars of honey from the farms
inland. The cafe by the harbor office puts its tables out on the stones
and serves coffee to people who have nowhere particular to be, which
the fishermen find gently hilarious, time being to them a thing the
tide spends and not a thing a person saves. The visitors photograph
the boats, the nets, the bread in the bakery window, the old men on
the bench by the seawall; the old men charge nothing for this and give
nothing away either, answering questions about the sea with the same
three weatherproof sentences they have used on strangers since before
the war. In the long evenings the light stays on the water until ten,
and the harbor turns the colour of tea and then of slate, and the
smell of frying fish drifts along the high street from the vans by the
slipway. The town takes the visitors' money politely and puts most of
it away against the winter, like everything else worth keeping. By the
first week of September the dinghies are gone, the cafe tables come in,
the market shrinks back to fish and bread, and the town lets out a
breath it did not know it was holding. The gulls resettle on the quay,
the tide table resumes its place as the only timetable that matters,
and on the first grey morning of the autumn the boats go out past the
breakwater into a clean wind, and the whole summer folds itself up
like a deckchair and is stored in the sheds with the spare nets, out
of the weather, until it is wanted again.)";

}  // namespace

const std::string& english_text(int i) {
  static const std::string texts[4] = {kText0, kText1, kText2, kText3};
  if (i < 0 || i > 3) throw DataError("english_text index out of range");
  return texts[i];
}

ByteVec random_bytes(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ByteVec out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng() & 0xff);
  return out;
}

std::string printable_random(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::string out(n, ' ');
  for (auto& c : out) c = static_cast<char>(33 + (rng() % 94));
  return out;
}

std::string repetitive_text(std::size_t n, int variant) {
  std::string unit;
  switch (variant & 3) {
    case 0: unit = "a"; break;
    case 1: unit = "ab"; break;
    case 2: unit = "0123456789abcdef"; break;
    default:
      unit = "the quick brown fox jumps over the lazy dog again and again. ";
      break;
  }
  std::string out;
  while (out.size() < n) out += unit;
  out.resize(n);
  return out;
}

std::vector<std::string> write_demo_corpus(const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<std::string> names;
  for (int i = 0; i < 4; ++i) {
    std::string name = "text_" + std::to_string(i) + ".txt";
    write_file(dir + "/" + name, english_text(i));
    names.push_back(name);
  }
  for (int i = 0; i < 4; ++i) {
    std::string name = "random_" + std::to_string(i) + ".txt";
    write_file(dir + "/" + name, printable_random(6000, 1000 + i));
    names.push_back(name);
  }
  for (int i = 0; i < 4; ++i) {
    std::string name = "repeat_" + std::to_string(i) + ".txt";
    write_file(dir + "/" + name, repetitive_text(6000, i));
    names.push_back(name);
  }
  std::sort(names.begin(), names.end());
  return names;
}

CountSnapshot horse_rider_snapshot() {
  CountSnapshot s;
  s.singletons["horse"] = 46700000;
  s.singletons["rider"] = 12200000;
  s.doubletons[make_pair_key("horse", "rider")] = 2630000;
  s.normalizer_n = 8058044651ULL;
  s.source = "worked-example";
  return s;
}

CountSnapshot complete_snapshot() {
  CountSnapshot s;
  s.singletons["alpha"] = 100;
  s.singletons["beta"] = 200;
  s.singletons["gamma"] = 300;
  s.doubletons[make_pair_key("alpha", "beta")] = 10;
  s.doubletons[make_pair_key("alpha", "gamma")] = 20;
  s.doubletons[make_pair_key("beta", "gamma")] = 30;
  s.normalizer_n = 660;  // equals the sum of all counts
  s.source = "complete-fixture";
  return s;
}

namespace {

bool is_prime(int v) {
  if (v < 2) return false;
  for (int d = 2; d * d <= v; ++d)
    if (v % d == 0) return false;
  return true;
}

const int kTrainPositive[] = {11, 13, 17, 19, 2,  23, 29, 3,  31, 37, 41,
                              43, 47, 5,  53, 59, 61, 67, 7,  71, 73};
const int kTrainNegative[] = {10, 12, 14, 15, 16, 18, 20, 21, 22, 24, 25,
                              26, 27, 28, 30, 32, 33, 34, 4,  6,  8,  9};
const int kTestWords[] = {101, 103, 107, 109, 79, 83, 89, 97, 36, 38,
                          40,  42,  44,  45,  46, 48, 49, 91, 110};

}  // namespace

std::vector<LabeledWord> prime_train_words() {
  std::vector<LabeledWord> out;
  for (int v : kTrainPositive) out.push_back({std::to_string(v), true});
  for (int v : kTrainNegative) out.push_back({std::to_string(v), false});
  return out;
}

std::vector<LabeledWord> prime_test_words() {
  std::vector<LabeledWord> out;
  for (int v : kTestWords) out.push_back({std::to_string(v), is_prime(v)});
  return out;
}

AnchorSet prime_anchors() {
  return AnchorSet{{"composite", "number", "orange", "prime", "record"}};
}

CountSnapshot prime_snapshot(bool paper_confusion) {
  CountSnapshot s;
  s.normalizer_n = 8058044651ULL;
  s.source = paper_confusion ? "prime-fixture-paper" : "prime-fixture-clean";
  s.singletons["composite"] = 25100000;
  s.singletons["number"] = 1550000000;
  s.singletons["orange"] = 60100000;
  s.singletons["prime"] = 77500000;
  s.singletons["record"] = 310000000;

  std::vector<int> words;
  for (int v : kTrainPositive) words.push_back(v);
  for (int v : kTrainNegative) words.push_back(v);
  for (int v : kTestWords) words.push_back(v);

  for (int v : words) {
    std::string w = std::to_string(v);
    int chars = 0;
    for (char c : w) chars += c;
    std::uint64_t f = 1500000 + 37000ULL * static_cast<std::uint64_t>(chars % 50);
    s.singletons[w] = f;
    bool prime_like = is_prime(v) || (paper_confusion && (v == 91 || v == 110));
    s.doubletons[make_pair_key(w, "prime")] = prime_like ? f * 3 / 10 : f / 100;
    s.doubletons[make_pair_key(w, "composite")] = prime_like ? f / 100 : f * 3 / 10;
    s.doubletons[make_pair_key(w, "number")] = f / 5;
    s.doubletons[make_pair_key(w, "orange")] = f / 500;
    s.doubletons[make_pair_key(w, "record")] = f / 50;
  }
  s.validate();
  return s;
}

DistanceMatrix random_matrix(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  DistanceMatrix m;
  for (int i = 0; i < n; ++i) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "L%02d", i);
    m.labels.push_back(buf);
  }
  m.values.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double v = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      m.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = v;
      m.at(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) = v;
    }
  return m;
}

DistanceMatrix dyadic_matrix(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  DistanceMatrix m = random_matrix(n, seed);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double v = static_cast<double>(rng() % 1025) / 1024.0;
      m.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = v;
      m.at(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) = v;
    }
  return m;
}

DistanceMatrix additive_metric(int n, std::uint64_t seed, TernaryTree* out_tree) {
  std::mt19937_64 rng(seed);
  TernaryTree tree = random_tree(n, rng);

  // Dyadic edge weights in [0.125, 1]; path sums stay exact.
  std::vector<double> weight(static_cast<std::size_t>(tree.node_count()) *
                                 tree.node_count(),
                             0.0);
  auto wset = [&](int u, int v, double w) {
    weight[static_cast<std::size_t>(u) * tree.node_count() + v] = w;
    weight[static_cast<std::size_t>(v) * tree.node_count() + u] = w;
  };
  for (auto [u, v] : tree.edges())
    wset(u, v, static_cast<double>(8 + rng() % 57) / 64.0);

  // Weighted distances between all leaves via DFS from each leaf.
  const int total = tree.node_count();
  std::vector<double> dist(static_cast<std::size_t>(n) * n, 0.0);
  for (int src = 0; src < n; ++src) {
    std::vector<double> d(static_cast<std::size_t>(total), -1.0);
    std::vector<int> stack{src};
    d[static_cast<std::size_t>(src)] = 0.0;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int u : tree.adj[v])
        if (u >= 0 && d[static_cast<std::size_t>(u)] < 0) {
          d[static_cast<std::size_t>(u)] =
              d[static_cast<std::size_t>(v)] +
              weight[static_cast<std::size_t>(v) * total + u];
          stack.push_back(u);
        }
    }
    for (int leaf = 0; leaf < n; ++leaf)
      dist[static_cast<std::size_t>(src) * n + leaf] =
          d[static_cast<std::size_t>(leaf)];
  }

  double maxd = 0;
  for (double v : dist) maxd = std::max(maxd, v);

  DistanceMatrix m;
  for (int i = 0; i < n; ++i) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "L%02d", i);
    m.labels.push_back(buf);
  }
  m.values.resize(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i)
    m.values[i] = dist[i] / (maxd + 1.0);

  if (out_tree) *out_tree = tree;
  return m;
}

}  // namespace compsim::testfix
