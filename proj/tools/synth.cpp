#include "synth.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>

#include "kgwalk/ntriples.hpp"
#include "kgwalk/random.hpp"

namespace kgwalk::synth {

namespace {

std::string num(const std::string& prefix, std::size_t i) { return res(prefix + "_" + std::to_string(i)); }

std::string typed(const std::string& value, const std::string& datatype) {
  return "\"" + value + "\"^^<" + kXsd + datatype + ">";
}

std::string year(std::size_t y) { return typed(std::to_string(y), "gYear"); }

bool has_duplicate(const std::vector<std::size_t>& slots, std::size_t begin, std::size_t end) {
  for (std::size_t i = begin; i < end; ++i) {
    for (std::size_t j = i + 1; j < end; ++j) {
      if (slots[i] == slots[j]) return true;
    }
  }
  return false;
}

/// Splits `slots` (items with repeats) into consecutive groups of the given
/// sizes such that no group holds an item twice.
std::vector<std::vector<std::size_t>> assign_groups(std::vector<std::size_t> slots,
                                                    const std::vector<std::size_t>& sizes, Rng& rng) {
  if (std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}) != slots.size()) {
    throw std::logic_error("group sizes do not cover the slots");
  }
  std::shuffle(slots.begin(), slots.end(), rng);
  std::vector<std::size_t> starts(sizes.size() + 1, 0);
  std::vector<std::size_t> owner(slots.size());
  for (std::size_t g = 0; g < sizes.size(); ++g) {
    starts[g + 1] = starts[g] + sizes[g];
    for (std::size_t i = starts[g]; i < starts[g + 1]; ++i) owner[i] = g;
  }
  const auto group_ok = [&](std::size_t g) { return !has_duplicate(slots, starts[g], starts[g + 1]); };
  for (std::size_t round = 0; round < 1000; ++round) {
    bool clean = true;
    for (std::size_t g = 0; g < sizes.size(); ++g) {
      if (group_ok(g)) continue;
      clean = false;
      for (std::size_t i = starts[g]; i < starts[g + 1]; ++i) {
        const std::size_t j = uniform_index(rng, slots.size());
        std::swap(slots[i], slots[j]);
        if (!group_ok(owner[j])) std::swap(slots[i], slots[j]);
      }
    }
    if (clean) {
      std::vector<std::vector<std::size_t>> groups(sizes.size());
      for (std::size_t g = 0; g < sizes.size(); ++g) {
        groups[g].assign(slots.begin() + static_cast<std::ptrdiff_t>(starts[g]),
                         slots.begin() + static_cast<std::ptrdiff_t>(starts[g + 1]));
      }
      return groups;
    }
  }
  throw std::runtime_error("could not assign groups without repeats");
}

std::vector<std::size_t> repeated(std::size_t items, std::size_t times) {
  std::vector<std::size_t> out;
  out.reserve(items * times);
  for (std::size_t i = 0; i < items; ++i) out.insert(out.end(), times, i);
  return out;
}

/// `count` distinct values from [0, n).
std::vector<std::size_t> distinct_sample(std::size_t n, std::size_t count, Rng& rng) {
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(std::min(count, n));
  std::sort(all.begin(), all.end());
  return all;
}

/// Maps consecutive blocks of `block` members to distinct targets drawn from [0, pool).
std::vector<std::size_t> block_targets(std::size_t members, std::size_t block, std::size_t pool, Rng& rng) {
  const std::size_t blocks = members / block;
  if (blocks * block != members || blocks > pool) throw std::logic_error("block assignment does not fit");
  std::vector<std::size_t> order(members);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const auto targets = distinct_sample(pool, blocks, rng);
  std::vector<std::size_t> out(members);
  for (std::size_t i = 0; i < members; ++i) out[order[i]] = targets[i / block];
  return out;
}

}  // namespace

Graph SynthGraph::build() const {
  GraphBuilder builder;
  for (const auto& t : triples) builder.add(t[0], t[1], t[2]);
  return std::move(builder).build();
}

void SynthGraph::write(std::ostream& out) const {
  for (const auto& t : triples) {
    out << ntriples_term(t[0]) << ' ' << ntriples_term(t[1]) << ' ' << ntriples_term(t[2]) << " .\n";
  }
}

SynthGraph chain() {
  SynthGraph kg;
  kg.type_iri = onto("Film");
  kg.type(res("f"), onto("Film"));
  kg.add(res("f"), onto("p"), res("x"));
  kg.add(res("x"), onto("q"), res("y"));
  return kg;
}

SynthGraph franchise(const FranchiseOptions& o) {
  if (o.franchises == 0 || o.films_per < 2) throw std::invalid_argument("need at least one franchise of two films");
  Rng rng(derive_seed(o.seed, 11));
  SynthGraph kg;
  kg.type_iri = onto("Film");
  kg.notes = {{"generator", "franchise"},
              {"franchises", std::to_string(o.franchises)},
              {"films_per", std::to_string(o.films_per)},
              {"standalone", std::to_string(o.standalone)}};

  constexpr std::size_t kGenres = 6, kCountries = 3, kCategories = 12, kCities = 8, kYears = 40;
  constexpr std::size_t kSharedStyles = 8, kStyleGroups = 3, kSharedActors = 30, kSharedComposers = 10;
  const auto pick = [&](std::size_t n) { return uniform_index(rng, n); };

  for (std::size_t i = 0; i < kGenres; ++i) kg.type(num("Genre", i), onto("Genre"));
  for (std::size_t i = 0; i < kCountries; ++i) kg.type(num("Country", i), onto("Country"));
  for (std::size_t i = 0; i < kCategories; ++i) kg.add(num("Category", i), onto("label"), "\"category " + std::to_string(i) + "\"");
  for (std::size_t i = 0; i < kCities; ++i) kg.type(num("City", i), onto("City"));

  const auto film_hubs = [&](const std::string& film) {
    kg.type(film, onto("Film"));
    for (auto g : distinct_sample(kGenres, 2, rng)) kg.add(film, onto("genre"), num("Genre", g));
    kg.add(film, onto("country"), num("Country", pick(kCountries)));
    for (auto c : distinct_sample(kCategories, 2, rng)) kg.add(film, onto("subject"), num("Category", c));
    kg.add(film, onto("releaseYear"), year(1960 + pick(kYears)));
  };
  const auto person = [&](const std::string& p, std::size_t subjects) {
    kg.type(p, onto("Person"));
    kg.add(p, onto("birthPlace"), num("City", pick(kCities)));
    kg.add(p, onto("birthYear"), year(1920 + pick(kYears)));
    kg.add(p, onto("nationality"), num("Country", pick(kCountries)));
    for (auto c : distinct_sample(kCategories, subjects, rng)) kg.add(p, onto("subject"), num("Category", c));
  };
  const auto style = [&](const std::string& s) {
    kg.type(s, onto("Style"));
    kg.add(s, onto("broader"), num("StyleGroup", pick(kStyleGroups)));
  };

  for (std::size_t f = 0; f < o.franchises; ++f) {
    const std::string tag = "Franchise" + std::to_string(f);
    const std::string director = res(tag + "_Director");
    const std::string composer = res(tag + "_Composer");
    person(director, 3);
    person(composer, 2);
    style(res(tag + "_Style"));
    kg.add(director, onto("knownFor"), res(tag + "_Style"));
    std::vector<std::string> characters;
    for (std::size_t k = 0; k < 3; ++k) {
      const std::string character = res(tag + "_Character" + std::to_string(k));
      const std::string actor = res(tag + "_Actor" + std::to_string(k));
      kg.type(character, onto("Character"));
      kg.add(character, onto("portrayedBy"), actor);
      person(actor, 2);
      characters.push_back(character);
    }
    std::vector<std::string> films;
    for (std::size_t j = 0; j < o.films_per; ++j) films.push_back(res(tag + "_Film" + std::to_string(j)));
    for (const auto& film : films) {
      film_hubs(film);
      kg.add(film, onto("director"), director);
      kg.add(film, onto("music"), composer);
      for (const auto& c : characters) kg.add(film, onto("character"), c);
      auto& truth = kg.truth[film];
      for (const auto& other : films) {
        if (other != film) truth.insert(other);
      }
    }
  }

  for (std::size_t i = 0; i < kSharedStyles; ++i) style(num("SharedStyle", i));
  for (std::size_t i = 0; i < kSharedActors; ++i) person(num("Actor", i), 2);
  for (std::size_t i = 0; i < kSharedComposers; ++i) person(num("Composer", i), 2);
  for (std::size_t i = 0; i < o.standalone; ++i) {
    const std::string film = num("Film", i);
    const std::string director = num("Director", i);
    film_hubs(film);
    person(director, 3);
    kg.add(film, onto("director"), director);
    kg.add(director, onto("knownFor"), num("SharedStyle", pick(kSharedStyles)));
    kg.add(film, onto("music"), num("Composer", pick(kSharedComposers)));
    for (std::size_t k = 0; k < 2; ++k) {
      const std::string character = res("Film_" + std::to_string(i) + "_Character" + std::to_string(k));
      kg.type(character, onto("Character"));
      kg.add(film, onto("character"), character);
      kg.add(character, onto("portrayedBy"), num("Actor", pick(kSharedActors)));
    }
  }

  for (std::size_t i = 0; i < o.persons; ++i) {
    person(num("Person", i), 3);
    if (pick(4) == 0) kg.add(num("Person", i), onto("knownFor"), num("SharedStyle", pick(kSharedStyles)));
  }
  for (std::size_t i = 0; i < o.books; ++i) {
    const std::string book = num("Book", i);
    kg.type(book, onto("Book"));
    for (auto g : distinct_sample(kGenres, 1 + pick(2), rng)) kg.add(book, onto("genre"), num("Genre", g));
    kg.add(book, onto("country"), num("Country", pick(kCountries)));
    for (auto c : distinct_sample(kCategories, 2, rng)) kg.add(book, onto("subject"), num("Category", c));
    if (o.persons > 0) kg.add(book, onto("author"), num("Person", pick(o.persons)));
  }
  return kg;
}

SynthGraph regular(const RegularOptions& o) {
  if (o.films == 0 || o.films % 24 != 0) throw std::invalid_argument("regular fixture needs a multiple of 24 films");
  Rng rng(derive_seed(o.seed, 12));
  SynthGraph kg;
  kg.type_iri = onto("Film");
  kg.notes = {{"generator", "regular"}, {"films", std::to_string(o.films)}};

  const std::size_t nf = o.films;
  const std::size_t nd = nf / 3;       // 3 films each
  const std::size_t na = 3 * nf / 2;   // 3 per film, 2 films each
  const std::size_t ng = nf / 6;       // 2 per film, 12 films each
  const std::size_t nw = std::max<std::size_t>(10, nf / 4);
  const std::size_t nb = 4 * nw;       // one author each, 4 books per writer

  const auto film = [&](std::size_t i) { return num("Film", i); };
  const auto director = [&](std::size_t i) { return num("Director", i); };
  const auto actor = [&](std::size_t i) { return num("Actor", i); };
  const auto writer = [&](std::size_t i) { return num("Writer", i); };

  for (std::size_t i = 0; i < nf; ++i) {
    kg.type(film(i), onto("Film"));
    kg.add(film(i), onto("releaseDate"),
           typed(std::to_string(1950 + i / 12) + "-" + (i % 12 < 9 ? "0" : "") + std::to_string(i % 12 + 1) + "-01",
                 "date"));
  }
  for (std::size_t i = 0; i < ng; ++i) kg.type(num("Genre", i), onto("Genre"));

  const auto directed = assign_groups(repeated(nd, 3), std::vector<std::size_t>(nf, 1), rng);
  for (std::size_t i = 0; i < nf; ++i) kg.add(film(i), onto("director"), director(directed[i][0]));
  const auto cast = assign_groups(repeated(na, 2), std::vector<std::size_t>(nf, 3), rng);
  for (std::size_t i = 0; i < nf; ++i) {
    for (auto a : cast[i]) kg.add(film(i), onto("starring"), actor(a));
  }
  const auto genres = assign_groups(repeated(ng, 12), std::vector<std::size_t>(nf, 2), rng);
  for (std::size_t i = 0; i < nf; ++i) {
    for (auto g : genres[i]) kg.add(film(i), onto("genre"), num("Genre", g));
  }

  const auto authored = assign_groups(repeated(nw, 4), std::vector<std::size_t>(nb, 1), rng);
  for (std::size_t i = 0; i < nb; ++i) {
    const std::string book = num("Book", i);
    kg.type(book, onto("Book"));
    kg.add(book, onto("author"), writer(authored[i][0]));
    for (auto g : distinct_sample(ng, 1 + uniform_index(rng, 2), rng)) kg.add(book, onto("genre"), num("Genre", g));
  }

  // Awards top every director up to in-degree 4 (3 films + 1) and every actor
  // likewise (2 films + 2).
  std::vector<std::size_t> honorees = repeated(nd, 1);
  for (std::size_t a = 0; a < na; ++a) honorees.insert(honorees.end(), 2, nd + a);
  std::vector<std::size_t> award_sizes(honorees.size() / 3, 3);
  if (honorees.size() % 3 != 0) award_sizes.push_back(honorees.size() % 3);
  const auto awards = assign_groups(honorees, award_sizes, rng);
  for (std::size_t i = 0; i < awards.size(); ++i) {
    const std::string award = num("Award", i);
    kg.type(award, onto("Award"));
    for (auto h : awards[i]) kg.add(award, onto("honoree"), h < nd ? director(h) : actor(h - nd));
  }

  // Person attributes: directors and actors are placed in fixed-size blocks
  // per end node so every end node reached from films is reached equally often.
  const std::size_t cities = std::max(nd / 2, na / 2) + 10;
  const std::size_t countries = std::max(nd / 4, na / 6) + 2;
  const std::size_t styles = nd / 2 + 5;
  const std::size_t years = std::max(nd / 2, na / 4) + 5;
  for (std::size_t i = 0; i < cities; ++i) kg.type(num("City", i), onto("City"));
  for (std::size_t i = 0; i < countries; ++i) kg.type(num("Country", i), onto("Country"));
  for (std::size_t i = 0; i < styles; ++i) kg.type(num("Style", i), onto("Style"));

  const auto attributes = [&](const std::string& p, std::size_t city, std::size_t country, std::size_t birth) {
    kg.type(p, onto("Person"));
    kg.add(p, onto("birthPlace"), num("City", city));
    kg.add(p, onto("nationality"), num("Country", country));
    kg.add(p, onto("birthYear"), year(1900 + birth));
  };
  {
    const auto city = block_targets(nd, 2, cities, rng);
    const auto country = block_targets(nd, 4, countries, rng);
    const auto birth = block_targets(nd, 2, years, rng);
    const auto style = block_targets(nd, 2, styles, rng);
    for (std::size_t i = 0; i < nd; ++i) {
      attributes(director(i), city[i], country[i], birth[i]);
      kg.add(director(i), onto("knownFor"), num("Style", style[i]));
    }
  }
  {
    const auto city = block_targets(na, 2, cities, rng);
    const auto country = block_targets(na, 6, countries, rng);
    const auto birth = block_targets(na, 4, years, rng);
    for (std::size_t i = 0; i < na; ++i) attributes(actor(i), city[i], country[i], birth[i]);
  }
  for (std::size_t i = 0; i < nw; ++i) {
    attributes(writer(i), uniform_index(rng, cities), uniform_index(rng, countries), uniform_index(rng, years));
    if (uniform_index(rng, 2) == 0) kg.add(writer(i), onto("knownFor"), num("Style", uniform_index(rng, styles)));
  }
  return kg;
}

SynthGraph relevance(const RelevanceOptions& o) {
  if (o.directors == 0 || o.films < o.directors) throw std::invalid_argument("need at least one film per director");
  if (o.categories_per_director > o.categories || o.categories_per_other > o.categories) {
    throw std::invalid_argument("not enough categories");
  }
  Rng rng(derive_seed(o.seed, 13));
  SynthGraph kg;
  kg.type_iri = onto("Film");
  kg.notes = {{"generator", "relevance"}, {"films", std::to_string(o.films)}};

  for (std::size_t i = 0; i < o.cities; ++i) kg.type(num("City", i), onto("City"));
  for (std::size_t i = 0; i < o.styles; ++i) kg.type(num("Style", i), onto("Style"));
  for (std::size_t i = 0; i < o.films; ++i) {
    kg.type(num("Film", i), onto("Film"));
    kg.add(num("Film", i), onto("director"), num("Director", i % o.directors));
  }
  for (std::size_t i = 0; i < o.directors; ++i) {
    const std::string d = num("Director", i);
    kg.type(d, onto("Person"));
    kg.add(d, onto("knownFor"), num("Style", i % o.styles));
    kg.add(d, onto("birthPlace"), num("City", uniform_index(rng, o.cities)));
    for (auto c : distinct_sample(o.categories, o.categories_per_director, rng)) {
      kg.add(d, onto("subject"), num("Category", c));
    }
    kg.add(num("Award", i % 50), onto("honoree"), d);
  }
  for (std::size_t i = 0; i < o.writers; ++i) {
    const std::string w = num("Writer", i);
    kg.type(w, onto("Person"));
    kg.add(w, onto("knownFor"), num("Style", uniform_index(rng, o.styles)));
    kg.add(num("Book", 2 * i), onto("author"), w);
    kg.add(num("Book", 2 * i + 1), onto("author"), w);
  }
  for (std::size_t i = 0; i < o.others; ++i) {
    const std::string p = num("Person", i);
    kg.type(p, onto("Person"));
    kg.add(p, onto("birthPlace"), num("City", uniform_index(rng, o.cities)));
    for (auto c : distinct_sample(o.categories, o.categories_per_other, rng)) {
      kg.add(p, onto("subject"), num("Category", c));
    }
    kg.add(num("Award", uniform_index(rng, 50)), onto("honoree"), p);
    kg.add(num("Award", uniform_index(rng, 50)), onto("honoree"), p);
  }
  for (std::size_t i = 0; i < 50; ++i) kg.type(num("Award", i), onto("Award"));
  for (std::size_t i = 0; i < 2 * o.writers; ++i) kg.type(num("Book", i), onto("Book"));
  return kg;
}

SynthGraph mixed(const MixedOptions& o) {
  if (o.films == 0 || o.predicates == 0) throw std::invalid_argument("mixed fixture needs films and predicates");
  Rng rng(derive_seed(o.seed, 14));
  SynthGraph kg;
  kg.type_iri = onto("Film");
  kg.notes = {{"generator", "mixed"}, {"films", std::to_string(o.films)}, {"predicates", std::to_string(o.predicates)}};

  struct Predicate {
    std::string iri;
    std::size_t pool;
    double film_rate;
    double book_rate;
  };
  std::vector<Predicate> predicates;
  for (std::size_t i = 0; i < o.predicates; ++i) {
    const double u = uniform_real(rng);
    predicates.push_back({onto("p" + std::to_string(i)), 5 + uniform_index(rng, 26), 0.2 + 0.7 * uniform_real(rng),
                          u * u});
  }
  const auto target = [&](std::size_t p, std::size_t k) {
    return res("P" + std::to_string(p) + "_Target_" + std::to_string(k));
  };
  for (std::size_t i = 0; i < o.films; ++i) {
    const std::string f = num("Film", i);
    kg.type(f, onto("Film"));
    for (std::size_t p = 0; p < predicates.size(); ++p) {
      if (uniform_real(rng) < predicates[p].film_rate) {
        kg.add(f, predicates[p].iri, target(p, uniform_index(rng, predicates[p].pool)));
      }
    }
  }
  for (std::size_t i = 0; i < o.books; ++i) {
    const std::string b = num("Book", i);
    kg.type(b, onto("Book"));
    for (std::size_t p = 0; p < predicates.size(); ++p) {
      if (uniform_real(rng) < predicates[p].book_rate) {
        kg.add(b, predicates[p].iri, target(p, uniform_index(rng, predicates[p].pool)));
      }
    }
  }
  return kg;
}

SynthGraph dense(const DenseOptions& o) {
  if (o.films < 2 || o.persons < 3) throw std::invalid_argument("dense fixture needs 2 films and 3 persons");
  Rng rng(derive_seed(o.seed, 15));
  SynthGraph kg;
  kg.type_iri = onto("Film");
  kg.notes = {{"generator", "dense"}, {"films", std::to_string(o.films)}, {"persons", std::to_string(o.persons)}};
  for (std::size_t i = 0; i < o.films; ++i) {
    kg.type(num("Film", i), onto("Film"));
    kg.add(onto("Film"), onto("member"), num("Film", i));
    for (auto p : distinct_sample(o.persons, 3, rng)) kg.add(num("Film", i), onto("starring"), num("Person", p));
  }
  for (std::size_t i = 0; i < o.persons; ++i) {
    kg.type(num("Person", i), onto("Person"));
    kg.add(onto("Person"), onto("member"), num("Person", i));
    for (auto f : distinct_sample(o.films, 2, rng)) kg.add(num("Person", i), onto("actedIn"), num("Film", f));
  }
  return kg;
}

}  // namespace kgwalk::synth
