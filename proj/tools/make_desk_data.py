#!/usr/bin/env python3
"""Generates the desk-scale fixtures under data/ and tests/fixtures/.

Output is deterministic; rerun after editing the tables below.
"""

import json
import random
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent
DBR = "http://dbpedia.org/resource/"
DBO = "http://dbpedia.org/ontology/"
RDFS_LABEL = "http://www.w3.org/2000/01/rdf-schema#label"
SKOS_ALT = "http://www.w3.org/2004/02/skos/core#altLabel"
XSD_INT = "http://www.w3.org/2001/XMLSchema#integer"

triples = []


def iri(local, ns=DBR):
    return "<" + ns + local + ">"


def label(local, text, alt=()):
    triples.append((iri(local), "<" + RDFS_LABEL + ">", json.dumps(text) + "@en"))
    for a in alt:
        triples.append((iri(local), "<" + SKOS_ALT + ">", json.dumps(a) + "@en"))


def fact(s, p, o):
    triples.append((iri(s), iri(p, DBO), iri(o)))


def number(s, p, n):
    triples.append((iri(s), iri(p, DBO), '"%d"^^<%s>' % (n, XSD_INT)))


# country: (label, capital, population, currency, language, largest city)
COUNTRIES = {
    "Canada": ("Canada", "Ottawa", 38929902, "Canadian_dollar", "English_language", "Toronto"),
    "Germany": ("Germany", "Berlin", 83190556, "Euro", "German_language", "Berlin"),
    "France": ("France", "Paris", 67413000, "Euro", "French_language", "Paris"),
    "Italy": ("Italy", "Rome", 59236213, "Euro", "Italian_language", "Rome"),
    "Spain": ("Spain", "Madrid", 47450795, "Euro", "Spanish_language", "Madrid"),
    "Japan": ("Japan", "Tokyo", 125360000, "Japanese_yen", "Japanese_language", "Tokyo"),
    "Brazil": ("Brazil", "Brasilia", 213317639, "Brazilian_real", "Portuguese_language", "Sao_Paulo"),
    "Egypt": ("Egypt", "Cairo", 102334404, "Egyptian_pound", "Arabic", "Cairo"),
    "India": ("India", "New_Delhi", 1352642280, "Indian_rupee", "Hindi", "Mumbai"),
    "Australia": ("Australia", "Canberra", 25890773, "Australian_dollar", "English_language", "Sydney"),
    "Georgia_(country)": ("Georgia", "Tbilisi", 3716858, "Georgian_lari", "Georgian_language", "Tbilisi"),
    "Austria": ("Austria", "Vienna", 8935112, "Euro", "German_language", "Vienna"),
    "Hungary": ("Hungary", "Budapest", 9769526, "Hungarian_forint", "Hungarian_language", "Budapest"),
    "Netherlands": ("Netherlands", "Amsterdam", 17590672, "Euro", "Dutch_language", "Amsterdam"),
    "Switzerland": ("Switzerland", "Bern", 8636896, "Swiss_franc", "German_language", "Zurich"),
    "Peru": ("Peru", "Lima", 32971846, "Peruvian_sol", "Spanish_language", "Lima"),
    "Sudan": ("Sudan", "Khartoum", 43849269, "Sudanese_pound", "Arabic", "Omdurman"),
    "Poland": ("Poland", "Warsaw", 38268000, "Polish_zloty", "Polish_language", "Warsaw"),
    "Denmark": ("Denmark", "Copenhagen", 5873420, "Danish_krone", "Danish_language", "Copenhagen"),
    "United_Kingdom": ("United Kingdom", "London", 67081000, "Pound_sterling", "English_language", "London"),
    "United_States": ("United States", "Washington,_D.C.", 331449281, "United_States_dollar",
                      "English_language", "New_York_City"),
    "Croatia": ("Croatia", "Zagreb", 4047200, "Euro", "Croatian_language", "Zagreb"),
}

# city: (label, country, population)
CITIES = {
    "Ottawa": ("Ottawa", "Canada", 1017449), "Toronto": ("Toronto", "Canada", 2794356),
    "Berlin": ("Berlin", "Germany", 3677472), "Ulm": ("Ulm", "Germany", 126949),
    "Kiel": ("Kiel", "Germany", 246601), "Paris": ("Paris", "France", 2165423),
    "Rome": ("Rome", "Italy", 2860009), "Pisa": ("Pisa", "Italy", 90488),
    "Madrid": ("Madrid", "Spain", 3305408), "Tokyo": ("Tokyo", "Japan", 13960000),
    "Brasilia": ("Brasilia", "Brazil", 3094325), "Sao_Paulo": ("Sao Paulo", "Brazil", 12325232),
    "Cairo": ("Cairo", "Egypt", 9539673), "New_Delhi": ("New Delhi", "India", 249998),
    "Mumbai": ("Mumbai", "India", 12442373), "Canberra": ("Canberra", "Australia", 431380),
    "Sydney": ("Sydney", "Australia", 5312163), "Tbilisi": ("Tbilisi", "Georgia_(country)", 1202731),
    "Vienna": ("Vienna", "Austria", 1931593), "Budapest": ("Budapest", "Hungary", 1752286),
    "Amsterdam": ("Amsterdam", "Netherlands", 921402), "Bern": ("Bern", "Switzerland", 134591),
    "Zurich": ("Zurich", "Switzerland", 421878), "Lima": ("Lima", "Peru", 9751717),
    "Khartoum": ("Khartoum", "Sudan", 5274321), "Omdurman": ("Omdurman", "Sudan", 2395159),
    "Warsaw": ("Warsaw", "Poland", 1863056), "Copenhagen": ("Copenhagen", "Denmark", 644431),
    "London": ("London", "United_Kingdom", 8982000), "Bristol": ("Bristol", "United_Kingdom", 467099),
    "Washington,_D.C.": ("Washington, D.C.", "United_States", 689545),
    "New_York_City": ("New York City", "United_States", 8804190),
    "Honolulu": ("Honolulu", "United_States", 345064), "Milwaukee": ("Milwaukee", "United_States", 577222),
    "Zagreb": ("Zagreb", "Croatia", 767131), "Smiljan": ("Smiljan", "Croatia", 400),
    "Atlanta": ("Atlanta", "United_States", 498715),
}

AWARDS = {
    "Nobel_Prize_in_Physics": "Nobel Prize in Physics",
    "Nobel_Prize_in_Chemistry": "Nobel Prize in Chemistry",
    "Nobel_Peace_Prize": "Nobel Peace Prize",
    "Turing_Award": "Turing Award",
    "Copley_Medal": "Copley Medal",
    "Edison_Medal": "Edison Medal",
    "Fields_Medal": "Fields Medal",
}

# person: (label, short name, birth place, death place or None, awards)
PEOPLE = {
    "Nikola_Tesla": ("Nikola Tesla", "Tesla", "Smiljan", "New_York_City", ["Nobel_Prize_in_Physics", "Edison_Medal"]),
    "Albert_Einstein": ("Albert Einstein", "Einstein", "Ulm", None, ["Nobel_Prize_in_Physics", "Copley_Medal"]),
    "Marie_Curie": ("Marie Curie", "Curie", "Warsaw", None, ["Nobel_Prize_in_Physics", "Nobel_Prize_in_Chemistry"]),
    "Niels_Bohr": ("Niels Bohr", "Bohr", "Copenhagen", "Copenhagen", ["Nobel_Prize_in_Physics", "Copley_Medal"]),
    "Max_Planck": ("Max Planck", "Planck", "Kiel", None, ["Nobel_Prize_in_Physics", "Copley_Medal"]),
    "Paul_Dirac": ("Paul Dirac", "Dirac", "Bristol", None, ["Nobel_Prize_in_Physics", "Copley_Medal"]),
    "Richard_Feynman": ("Richard Feynman", "Feynman", "New_York_City", None, ["Nobel_Prize_in_Physics"]),
    "Linus_Pauling": ("Linus Pauling", "Pauling", None, None, ["Nobel_Prize_in_Chemistry", "Nobel_Peace_Prize"]),
    "Dorothy_Hodgkin": ("Dorothy Hodgkin", "Hodgkin", "Cairo", None, ["Nobel_Prize_in_Chemistry", "Copley_Medal"]),
    "Alan_Turing": ("Alan Turing", "Turing", "London", None, []),
    "Tim_Berners-Lee": ("Tim Berners-Lee", "Berners-Lee", "London", None, ["Turing_Award"]),
    "Donald_Knuth": ("Donald Knuth", "Knuth", "Milwaukee", None, ["Turing_Award"]),
    "Barack_Obama": ("Barack Obama", "Obama", "Honolulu", None, ["Nobel_Peace_Prize"]),
    "Galileo_Galilei": ("Galileo Galilei", "Galileo", "Pisa", None, []),
    "Terence_Tao": ("Terence Tao", "Tao", None, None, ["Fields_Medal"]),
}

WORKS = {  # work: (label, predicate, value)
    "Mona_Lisa": ("Mona Lisa", "author", "Leonardo_da_Vinci"),
    "The_Starry_Night": ("The Starry Night", "author", "Vincent_van_Gogh"),
    "Hamlet": ("Hamlet", "author", "William_Shakespeare"),
    "Don_Quixote": ("Don Quixote", "author", "Miguel_de_Cervantes"),
    "Casablanca_(film)": ("Casablanca", "director", "Michael_Curtiz"),
    "Psycho_(1960_film)": ("Psycho", "director", "Alfred_Hitchcock"),
    "Moonlight_Sonata": ("Moonlight Sonata", "composer", "Ludwig_van_Beethoven"),
}
CREATORS = {
    "Leonardo_da_Vinci": "Leonardo da Vinci", "Vincent_van_Gogh": "Vincent van Gogh",
    "William_Shakespeare": "William Shakespeare", "Miguel_de_Cervantes": "Miguel de Cervantes",
    "Michael_Curtiz": "Michael Curtiz", "Alfred_Hitchcock": "Alfred Hitchcock",
    "Ludwig_van_Beethoven": "Ludwig van Beethoven",
}

RIVERS = {
    "Danube": ("Danube", ["Germany", "Austria", "Hungary"]),
    "Rhine": ("Rhine", ["Switzerland", "Germany", "France", "Netherlands"]),
    "Nile": ("Nile", ["Egypt", "Sudan"]),
    "Amazon_River": ("Amazon River", ["Brazil", "Peru"]),
    "Ganges": ("Ganges", ["India"]),
    "Murray_River": ("Murray River", ["Australia"]),
    "Seine": ("Seine", ["France"]),
    "Po_(river)": ("Po River", ["Italy"]),
    "Vistula": ("Vistula", ["Poland"]),
}

LEADERS = {  # country: (leaderName value, leader value)
    "Canada": ("Justin_Trudeau", "Parliament_of_Canada"),
    "Germany": ("Olaf_Scholz", "Bundestag"),
    "France": ("Emmanuel_Macron", "French_Parliament"),
    "Japan": ("Fumio_Kishida", "National_Diet"),
    "India": ("Narendra_Modi", "Parliament_of_India"),
}
LEADER_LABELS = {
    "Justin_Trudeau": "Justin Trudeau", "Olaf_Scholz": "Olaf Scholz", "Emmanuel_Macron": "Emmanuel Macron",
    "Fumio_Kishida": "Fumio Kishida", "Narendra_Modi": "Narendra Modi",
    "Parliament_of_Canada": "Parliament of Canada", "Bundestag": "Bundestag",
    "French_Parliament": "French Parliament", "National_Diet": "National Diet",
    "Parliament_of_India": "Parliament of India",
}


def build_kg():
    for c, (name, capital, pop, currency, lang, largest) in COUNTRIES.items():
        label(c, name)
        fact(c, "capital", capital)
        number(c, "populationTotal", pop)
        fact(c, "currency", currency)
        fact(c, "officialLanguage", lang)
        fact(c, "largestCity", largest)
    # The U.S. state shares the surface form "Georgia" with the country.
    label("Georgia_(U.S._state)", "Georgia")
    fact("Georgia_(U.S._state)", "capital", "Atlanta")
    number("Georgia_(U.S._state)", "populationTotal", 10711908)
    fact("Georgia_(U.S._state)", "country", "United_States")
    fact("Georgia_(U.S._state)", "largestCity", "Atlanta")
    label("Antarctica", "Antarctica")
    label("Vatican_City", "Vatican City")
    fact("Vatican_City", "officialLanguage", "Italian_language")
    for c, (name, country, pop) in CITIES.items():
        label(c, name)
        fact(c, "country", country)
        number(c, "populationTotal", pop)
    for a, name in AWARDS.items():
        label(a, name)
    for p, (name, short, birth, death, awards) in PEOPLE.items():
        label(p, name, [short])
        if birth:
            fact(p, "birthPlace", birth)
        if death:
            fact(p, "deathPlace", death)
        for a in awards:
            fact(p, "award", a)
    label("Alexander_Graham_Bell", "Alexander Graham Bell", ["Graham Bell"])
    fact("Alexander_Graham_Bell", "birthPlace", "Edinburgh")
    label("Edinburgh", "Edinburgh")
    fact("Edinburgh", "country", "United_Kingdom")
    for w, (name, pred, value) in WORKS.items():
        label(w, name)
        fact(w, pred, value)
    for c, name in CREATORS.items():
        label(c, name)
    for r, (name, countries) in RIVERS.items():
        label(r, name)
        for c in countries:
            fact(r, "country", c)
    for c, (name_value, leader_value) in LEADERS.items():
        fact(c, "leaderName", name_value)
        fact(c, "leader", leader_value)
    for e, name in LEADER_LABELS.items():
        label(e, name)
    currencies = sorted({v[3] for v in COUNTRIES.values()})
    languages = sorted({v[4] for v in COUNTRIES.values()})
    for e in currencies + languages:
        label(e, e.replace("_", " "))


SYNONYMS = [
    ("win", "award"), ("won", "award"), ("wins", "award"), ("receive", "award"), ("received", "award"),
    ("born", "birthPlace"), ("die", "deathPlace"), ("died", "deathPlace"),
    ("population", "populationTotal"), ("inhabitants", "populationTotal"),
    ("wrote", "author"), ("written", "author"),
    ("flow", "country"), ("flows", "country"), ("located", "country"),
    ("leads", "leader"), ("lead", "leader"),
    ("language", "officialLanguage"), ("spoken", "officialLanguage"),
    ("biggest city", "largestCity"),
]


def sel(*patterns):
    body = " . ".join(patterns)
    return "SELECT DISTINCT ?uri WHERE { " + body + " }"


def ask(*patterns):
    return "ASK WHERE { " + " . ".join(patterns) + " }"


def r(local):
    return iri(local)


def o(local):
    return iri(local, DBO)


def build_dataset():
    qs = []

    def add(question, sparql):
        qs.append((question, sparql))

    # Yes/no questions about awards and birth places.
    add("Did Tesla win a nobel prize in physics?", ask(f"{r('Nikola_Tesla')} {o('award')} {r('Nobel_Prize_in_Physics')}"))
    bool_awards = [
        ("Einstein", "Albert_Einstein", "Nobel Prize in Physics", "Nobel_Prize_in_Physics"),
        ("Curie", "Marie_Curie", "Nobel Prize in Chemistry", "Nobel_Prize_in_Chemistry"),
        ("Bohr", "Niels_Bohr", "Copley Medal", "Copley_Medal"),
        ("Planck", "Max_Planck", "Nobel Prize in Physics", "Nobel_Prize_in_Physics"),
        ("Dirac", "Paul_Dirac", "Nobel Prize in Chemistry", "Nobel_Prize_in_Chemistry"),
        ("Feynman", "Richard_Feynman", "Turing Award", "Turing_Award"),
        ("Pauling", "Linus_Pauling", "Nobel Peace Prize", "Nobel_Peace_Prize"),
        ("Hodgkin", "Dorothy_Hodgkin", "Nobel Prize in Chemistry", "Nobel_Prize_in_Chemistry"),
        ("Knuth", "Donald_Knuth", "Turing Award", "Turing_Award"),
        ("Obama", "Barack_Obama", "Nobel Peace Prize", "Nobel_Peace_Prize"),
        ("Berners-Lee", "Tim_Berners-Lee", "Fields Medal", "Fields_Medal"),
        ("Tao", "Terence_Tao", "Fields Medal", "Fields_Medal"),
        ("Tesla", "Nikola_Tesla", "Edison Medal", "Edison_Medal"),
        ("Galileo", "Galileo_Galilei", "Copley Medal", "Copley_Medal"),
    ]
    for short, person, award_label, award in bool_awards:
        add(f"Did {short} win the {award_label}?", ask(f"{r(person)} {o('award')} {r(award)}"))
    for short, person, award_label, award in bool_awards[:6]:
        add(f"Did {short} receive a {award_label.lower()}?", ask(f"{r(person)} {o('award')} {r(award)}"))
    bool_birth = [("Einstein", "Albert_Einstein", "Ulm"), ("Curie", "Marie_Curie", "Warsaw"),
                  ("Tesla", "Nikola_Tesla", "Smiljan"), ("Knuth", "Donald_Knuth", "Milwaukee"),
                  ("Obama", "Barack_Obama", "Honolulu"), ("Dirac", "Paul_Dirac", "London"),
                  ("Turing", "Alan_Turing", "Bristol")]
    for short, person, city in bool_birth:
        add(f"Was {short} born in {CITIES[city][0]}?", ask(f"{r(person)} {o('birthPlace')} {r(city)}"))

    # Attribute lookups on countries.
    for c in ["Canada", "Germany", "France", "Japan", "Brazil", "India", "Australia", "Egypt", "Peru",
              "Poland", "Denmark", "Hungary"]:
        add(f"What is the population of {COUNTRIES[c][0]}?", sel(f"{r(c)} {o('populationTotal')} ?uri"))
    for c in ["Canada", "Italy", "Spain", "Japan", "Austria", "Switzerland", "Netherlands", "Sudan", "Croatia"]:
        add(f"What is the capital of {COUNTRIES[c][0]}?", sel(f"{r(c)} {o('capital')} ?uri"))
    for c in ["Japan", "India", "Brazil", "Egypt", "Denmark", "United_Kingdom"]:
        add(f"What is the currency of {COUNTRIES[c][0]}?", sel(f"{r(c)} {o('currency')} ?uri"))
    for c in ["Brazil", "Egypt", "Hungary", "Poland"]:
        add(f"What is the official language of {COUNTRIES[c][0]}?", sel(f"{r(c)} {o('officialLanguage')} ?uri"))
    for c in ["Tokyo", "Cairo", "Lima", "Vienna", "Sydney"]:
        add(f"What is the population of {CITIES[c][0]}?", sel(f"{r(c)} {o('populationTotal')} ?uri"))
    # Ambiguous surface form: the linker picks the U.S. state.
    add("What is the capital of Georgia?", sel(f"{r('Georgia_(country)')} {o('capital')} ?uri"))
    add("What is the population of Georgia?", sel(f"{r('Georgia_(country)')} {o('populationTotal')} ?uri"))
    add("What is the currency of Georgia?", sel(f"{r('Georgia_(country)')} {o('currency')} ?uri"))
    add("Which language is spoken in Georgia?", sel(f"{r('Georgia_(country)')} {o('officialLanguage')} ?uri"))

    # Birth places and award winners.
    for person in ["Albert_Einstein", "Marie_Curie", "Max_Planck", "Linus_Pauling", "Barack_Obama",
                   "Alan_Turing", "Richard_Feynman", "Galileo_Galilei"]:
        add(f"Where was {PEOPLE[person][1]} born?", sel(f"{r(person)} {o('birthPlace')} ?uri"))
    for city in ["Ulm", "Warsaw", "London", "Copenhagen", "Honolulu"]:
        add(f"Who was born in {CITIES[city][0]}?", sel(f"?uri {o('birthPlace')} {r(city)}"))
    for award in ["Turing_Award", "Nobel_Peace_Prize", "Fields_Medal", "Nobel_Prize_in_Chemistry"]:
        add(f"Who won the {AWARDS[award]}?", sel(f"?uri {o('award')} {r(award)}"))
    for person in ["Marie_Curie", "Niels_Bohr", "Max_Planck"]:
        add(f"Which awards did {PEOPLE[person][1]} receive?", sel(f"{r(person)} {o('award')} ?uri"))
    add("Where did Tesla die?", sel(f"{r('Nikola_Tesla')} {o('deathPlace')} ?uri"))
    add("Where did Bohr die?", sel(f"{r('Niels_Bohr')} {o('deathPlace')} ?uri"))

    # Works: only "wrote" has a relation phrase in the lexicon.
    add("Who wrote Hamlet?", sel(f"{r('Hamlet')} {o('author')} ?uri"))
    add("Who wrote Don Quixote?", sel(f"{r('Don_Quixote')} {o('author')} ?uri"))
    add("Who painted the Mona Lisa?", sel(f"{r('Mona_Lisa')} {o('author')} ?uri"))
    add("Who painted The Starry Night?", sel(f"{r('The_Starry_Night')} {o('author')} ?uri"))
    add("Who directed Casablanca?", sel(f"{r('Casablanca_(film)')} {o('director')} ?uri"))
    add("Who made Psycho?", sel(f"{r('Psycho_(1960_film)')} {o('director')} ?uri"))
    add("Who created the Moonlight Sonata?", sel(f"{r('Moonlight_Sonata')} {o('composer')} ?uri"))
    add("Tell me who painted the famous Mona Lisa portrait.", sel(f"{r('Mona_Lisa')} {o('author')} ?uri"))

    # Rivers; two-country questions need a conjunction the builder cannot produce.
    for river in ["Ganges", "Seine", "Vistula", "Murray_River"]:
        add(f"In which country is the {RIVERS[river][0]}?", sel(f"{r(river)} {o('country')} ?uri"))
    add("Which rivers flow through Germany and Austria?",
        sel(f"?uri {o('country')} {r('Germany')}", f"?uri {o('country')} {r('Austria')}"))
    add("Which rivers flow through Egypt and Sudan?",
        sel(f"?uri {o('country')} {r('Egypt')}", f"?uri {o('country')} {r('Sudan')}"))
    add("Which rivers flow through Brazil and Peru?",
        sel(f"?uri {o('country')} {r('Brazil')}", f"?uri {o('country')} {r('Peru')}"))
    add("Which river flows through France and the Netherlands?",
        sel(f"?uri {o('country')} {r('France')}", f"?uri {o('country')} {r('Netherlands')}"))

    # Two-hop questions: the builder answers only the first hop.
    for c in ["France", "Japan", "Egypt", "Peru", "Austria"]:
        add(f"What is the population of the capital of {COUNTRIES[c][0]}?",
            sel(f"{r(c)} {o('capital')} ?x", f"?x {o('populationTotal')} ?uri"))
    for c in ["Australia", "Brazil", "India"]:
        add(f"How many inhabitants does the biggest city of {COUNTRIES[c][0]} have?",
            sel(f"{r(c)} {o('largestCity')} ?x", f"?x {o('populationTotal')} ?uri"))

    # "leads" maps to the wrong property.
    for c in LEADERS:
        add(f"Who leads {COUNTRIES[c][0]}?", sel(f"{r(c)} {o('leaderName')} ?uri"))

    # Entities described rather than named.
    add("Where was the inventor of the telephone born?", sel(f"{r('Alexander_Graham_Bell')} {o('birthPlace')} ?uri"))
    add("Where was the first woman to win a nobel prize born?", sel(f"{r('Marie_Curie')} {o('birthPlace')} ?uri"))
    add("What is the capital of the largest country in south america?", sel(f"{r('Brazil')} {o('capital')} ?uri"))
    add("what is the population of the country with the most people?", sel(f"{r('India')} {o('populationTotal')} ?uri"))
    add("which prize did the author of the theory of relativity win?", sel(f"{r('Albert_Einstein')} {o('award')} ?uri"))
    add("who received the physics prize for the photoelectric effect?",
        sel(f"?uri {o('award')} {r('Nobel_Prize_in_Physics')}"))
    add("where did the discoverer of radioactivity die?", sel(f"{r('Marie_Curie')} {o('deathPlace')} ?uri"))
    add("what currency is used in the land of the rising sun?", sel(f"{r('Japan')} {o('currency')} ?uri"))

    # Empty gold answers (dropped by the loader).
    add("What is the currency of Antarctica?", sel(f"{r('Antarctica')} {o('currency')} ?uri"))
    add("What is the capital of Antarctica?", sel(f"{r('Antarctica')} {o('capital')} ?uri"))
    add("Where was Tao born?", sel(f"{r('Terence_Tao')} {o('birthPlace')} ?uri"))
    add("Where did Einstein die?", sel(f"{r('Albert_Einstein')} {o('deathPlace')} ?uri"))

    # Outside the supported query subset.
    add("How many people were born in London?",
        "SELECT (COUNT(?uri) AS ?c) WHERE { ?uri " + o("birthPlace") + " " + r("London") + " }")
    add("Which country has the largest population?",
        "SELECT ?uri WHERE { ?uri " + o("populationTotal") + " ?p } ORDER BY DESC(?p) LIMIT 1")
    add("Which cities have more than ten million inhabitants?",
        "SELECT ?uri WHERE { ?uri " + o("populationTotal") + " ?p . FILTER(?p > 10000000) }")
    add("Who won a Nobel prize other than Einstein?",
        "SELECT ?uri WHERE { ?uri " + o("award") + " ?a . FILTER(?uri != " + r("Albert_Einstein") + ") }")
    add("Which scientists were born in Germany or Poland?",
        "SELECT ?uri WHERE { { ?uri " + o("birthPlace") + " ?c . ?c " + o("country") + " " + r("Germany")
        + " } UNION { ?uri " + o("birthPlace") + " ?c . ?c " + o("country") + " " + r("Poland") + " } }")

    return [{"id": "desk-%03d" % (i + 1), "question": q, "sparql": s} for i, (q, s) in enumerate(qs)]


FILTER_FIXTURE = [
    ("Did Einstein win the Nobel Prize in Physics?",
     ask(f"{r('Albert_Einstein')} {o('award')} {r('Nobel_Prize_in_Physics')}")),
    ("What is the capital of Canada?", sel(f"{r('Canada')} {o('capital')} ?uri")),
    ("What is the currency of Antarctica?", sel(f"{r('Antarctica')} {o('currency')} ?uri")),
    ("Where was Curie born?", sel(f"{r('Marie_Curie')} {o('birthPlace')} ?uri")),
    ("Who won the Turing Award?", sel(f"?uri {o('award')} {r('Turing_Award')}")),
    ("Where did Einstein die?", sel(f"{r('Albert_Einstein')} {o('deathPlace')} ?uri")),
    ("What is the population of Japan?", sel(f"{r('Japan')} {o('populationTotal')} ?uri")),
    ("Who wrote Hamlet?", sel(f"{r('Hamlet')} {o('author')} ?uri")),
    ("Where was Tao born?", sel(f"{r('Terence_Tao')} {o('birthPlace')} ?uri")),
    ("Which rivers flow through Egypt?", sel(f"?uri {o('country')} {r('Egypt')}")),
]

SURVEY = [  # (question, what the desk pipeline does with it)
    ("Did Tesla win a nobel prize in physics?", "correct"),
    ("What is the population of Canada?", "correct"),
    ("Who was born in Ulm?", "correct"),
    ("Who wrote Hamlet?", "correct"),
    ("What is the capital of Georgia?", "incorrect"),
    ("Who leads Germany?", "incorrect"),
    ("What is the population of the capital of France?", "incorrect"),
    ("Who painted the Mona Lisa?", "no_answer"),
    ("Where was the inventor of the telephone born?", "no_answer"),
    ("Who directed Casablanca?", "no_answer"),
]


def feedback_fixture(n=50):
    rng = random.Random(7)
    dims = ["justification", "education", "involvement", "acceptance"]
    out = []
    for i in range(n):
        out.append({
            "session_id": "session-%02d" % (i // 10 + 1),
            "question_id": "survey-%02d" % (i % len(SURVEY) + 1),
            "mode": "with_explanation" if i % 10 < 5 else "without_explanation",
            "timestamp": "2024-05-%02dT10:%02d:00Z" % (i // 10 + 1, i % 60),
            "ratings": {d: rng.randint(1, 5) for d in dims},
        })
    return out


def main():
    build_kg()
    data = ROOT / "data"
    data.mkdir(exist_ok=True)
    lines = sorted({" ".join(t) + " ." for t in triples})
    (data / "desk.nt").write_text("\n".join(lines) + "\n")
    (data / "relation_synonyms.tsv").write_text(
        "# surface form <TAB> predicate IRI\n" + "".join(f"{s}\t<{DBO}{p}>\n" for s, p in SYNONYMS))
    (data / "dataset.json").write_text(json.dumps(build_dataset(), indent=1) + "\n")
    survey = [{"id": "survey-%02d" % (i + 1), "question": q, "expected": kind} for i, (q, kind) in enumerate(SURVEY)]
    (data / "survey_questions.json").write_text(json.dumps(survey, indent=1) + "\n")
    fixtures = ROOT / "tests" / "fixtures"
    fixtures.mkdir(parents=True, exist_ok=True)
    fixture = [{"id": "filter-%02d" % (i + 1), "question": q, "sparql": s} for i, (q, s) in enumerate(FILTER_FIXTURE)]
    (fixtures / "filter_dataset.json").write_text(json.dumps(fixture, indent=1) + "\n")
    (fixtures / "feedback_50.json").write_text(json.dumps(feedback_fixture(), indent=1) + "\n")
    print(f"{len(lines)} triples, {len(build_dataset())} dataset records")


if __name__ == "__main__":
    main()
