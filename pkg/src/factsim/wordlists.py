"""Built-in lexicons for the synthetic corpus generator.

These are small, versioned fixture tables. The generator relies on a few
structural properties that ``tests/test_wordlists.py`` pins down:

* source and novel entity lists share no name tokens, so inserting a novel
  entity is guaranteed to be extrinsic;
* antonym values never appear as source vocabulary, so an antonym
  replacement is guaranteed to be extrinsic;
* synonym values never appear as source vocabulary, so a paraphrase changes
  exactly the substituted tokens and nothing else.
"""
from __future__ import annotations

from types import MappingProxyType

# 80 two-token names used inside generated source documents.
SOURCE_ENTITIES = (
    "Alice Whitfield", "Marcus Okafor", "Dana Brennan", "Felix Castillo",
    "Grace Duarte", "Hector Eriksen", "Irene Fontaine", "Jonas Gallagher",
    "Karen Hawthorne", "Leo Ibrahim", "Mona Jansen", "Nathan Kovacs",
    "Olga Lindqvist", "Priya Moreau", "Quinn Novak", "Rosa Ortega",
    "Samuel Petrov", "Tara Rosales", "Victor Sandoval", "Wendy Tanaka",
    "Alice Eriksen", "Marcus Fontaine", "Dana Gallagher", "Felix Hawthorne",
    "Grace Ibrahim", "Hector Jansen", "Irene Kovacs", "Jonas Lindqvist",
    "Karen Moreau", "Leo Novak", "Mona Ortega", "Nathan Petrov",
    "Olga Rosales", "Priya Sandoval", "Quinn Tanaka", "Rosa Whitfield",
    "Samuel Okafor", "Tara Brennan", "Victor Castillo", "Wendy Duarte",
    "Alice Jansen", "Marcus Kovacs", "Dana Lindqvist", "Felix Moreau",
    "Grace Novak", "Hector Ortega", "Irene Petrov", "Jonas Rosales",
    "Karen Sandoval", "Leo Tanaka", "Mona Whitfield", "Nathan Okafor",
    "Olga Brennan", "Priya Castillo", "Quinn Duarte", "Rosa Eriksen",
    "Samuel Fontaine", "Tara Gallagher", "Victor Hawthorne", "Wendy Ibrahim",
    "Alice Ortega", "Marcus Petrov", "Dana Rosales", "Felix Sandoval",
    "Grace Tanaka", "Hector Whitfield", "Irene Okafor", "Jonas Brennan",
    "Karen Castillo", "Leo Duarte", "Mona Eriksen", "Nathan Fontaine",
    "Olga Gallagher", "Priya Hawthorne", "Quinn Ibrahim", "Rosa Jansen",
    "Samuel Kovacs", "Tara Lindqvist", "Victor Moreau", "Wendy Novak",
)

# 20 names reserved for out-of-vocabulary insertion; no token overlaps with
# SOURCE_ENTITIES.
NOVEL_ENTITIES = (
    "Ambrose Ashdown", "Beatrix Birchall", "Caspian Cresswell",
    "Delphine Dunmore", "Evander Ellsworth", "Fiorella Fairbanks",
    "Gideon Grimsby", "Henrietta Holloway", "Ignatius Iverson",
    "Jemima Joplin", "Kerensa Kingsley", "Lysander Lockwood",
    "Morwenna Marchbanks", "Nikolai Nightingale", "Octavia Oakhurst",
    "Peregrine Pemberton", "Quintus Quarrington", "Rosalind Ravenhill",
    "Thaddeus Thornbury", "Wilhelmina Wexford",
)

# Past-tense verb -> opposite-meaning replacement. Keys are the only verbs
# the generator puts into source sentences; values never are.
VERB_ANTONYMS = MappingProxyType({
    "approved": "rejected", "accepted": "declined", "supported": "opposed",
    "praised": "criticized", "confirmed": "denied", "expanded": "reduced",
    "increased": "decreased", "raised": "lowered", "opened": "closed",
    "launched": "cancelled", "won": "lost", "bought": "sold",
    "hired": "fired", "strengthened": "weakened", "promoted": "demoted",
    "endorsed": "condemned", "completed": "abandoned", "entered": "exited",
    "arrived at": "departed from", "advanced": "retreated",
    "agreed to": "refused", "allowed": "forbade", "built": "demolished",
    "created": "destroyed", "defended": "attacked", "delivered": "withheld",
    "earned": "forfeited", "enabled": "prevented",
    "encouraged": "discouraged", "extended": "shortened",
    "filled": "emptied", "gained": "squandered", "helped": "hindered",
    "improved": "worsened", "included": "excluded", "installed": "removed",
    "invited": "banned", "locked": "unlocked", "obeyed": "defied",
    "passed": "failed", "permitted": "prohibited",
    "protected": "endangered", "repaired": "damaged",
    "revealed": "concealed", "signed": "voided", "started": "stopped",
    "tightened": "loosened", "trusted": "doubted", "unified": "divided",
    "welcomed": "shunned",
})

_NOUN_SYNONYMS = {
    "budget": "funding", "contract": "agreement", "bridge": "crossing",
    "museum": "gallery", "stadium": "arena", "library": "archive",
    "festival": "fair", "merger": "consolidation", "tunnel": "underpass",
    "reactor": "powerplant", "pipeline": "conduit", "orchard": "grove",
    "harbor": "port", "railway": "railroad", "canal": "waterway",
    "monument": "memorial", "plaza": "square", "shipyard": "dockyard",
    "lighthouse": "beacon", "viaduct": "trestle", "granary": "silo",
    "foundry": "smelter", "brewery": "taproom", "bakery": "bakehouse",
    "cathedral": "basilica", "vineyard": "winery", "depot": "warehouse",
    "terminal": "station", "pavilion": "bandstand", "marina": "boatyard",
    "clinic": "infirmary", "quarry": "pit", "sawmill": "lumberyard",
    "theater": "playhouse", "hotel": "inn", "prison": "penitentiary",
    "school": "academy", "courthouse": "tribunal", "factory": "plant",
    "market": "bazaar", "airfield": "airstrip", "bunker": "shelter",
    "chapel": "oratory", "castle": "fortress", "mill": "gristmill",
    "tower": "spire", "wharf": "quay", "ferry": "steamer",
}

_ADJ_SYNONYMS = {
    "large": "spacious", "modern": "contemporary", "historic": "storied",
    "controversial": "disputed", "ambitious": "bold", "costly": "expensive",
    "innovative": "inventive", "sprawling": "expansive",
    "derelict": "rundown", "iconic": "famous", "bustling": "lively",
    "remote": "isolated", "coastal": "seaside", "rural": "pastoral",
    "urban": "metropolitan", "aging": "crumbling", "vast": "immense",
    "compact": "snug", "ornate": "embellished", "austere": "plain",
}

_PLACE_SYNONYMS = {
    "riverside": "riverbank", "waterfront": "shorefront",
    "outskirts": "fringes", "boulevard": "avenue",
    "crossroads": "junction", "courtyard": "quadrangle",
    "embankment": "levee", "parkland": "meadows",
    "esplanade": "promenade", "hillside": "slope", "downtown": "midtown",
    "lakefront": "lakeshore", "foreshore": "seafront",
    "greenbelt": "greenway", "bayside": "bayshore",
}

# Single paraphrase table covering every noun/adjective/place the templates
# can emit.
SYNONYMS = MappingProxyType({**_NOUN_SYNONYMS, **_ADJ_SYNONYMS, **_PLACE_SYNONYMS})

NOUNS = tuple(sorted(_NOUN_SYNONYMS))
ADJECTIVES = tuple(sorted(_ADJ_SYNONYMS))
PLACES = tuple(sorted(_PLACE_SYNONYMS))
VERBS = tuple(sorted(VERB_ANTONYMS))

DAYS = ("Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday")

ROLES = (
    "mayor", "engineer", "architect", "curator", "chancellor", "senator",
    "biologist", "historian", "economist", "journalist", "diplomat",
    "astronomer", "surgeon", "professor", "inspector",
)

# Replacement sentences on deliberately unrelated topics; content vocabulary
# is disjoint from the template pools above.
OFF_TOPIC_SENTENCES = (
    "Quantum processors require cryogenic cooling to stay coherent.",
    "Sourdough starters need daily feeding with flour and water.",
    "Comet tails always point away from the sun.",
    "Honeybees communicate direction through a waggle dance.",
    "Glaciers carve deep valleys over thousands of years.",
    "Violins are tuned in perfect fifths.",
    "Octopuses can change both color and texture instantly.",
    "Sand dunes migrate several meters in a single storm.",
    "Fermentation converts sugars into alcohol and carbon dioxide.",
    "Chess engines evaluate millions of positions per second.",
    "Coral reefs bleach when seawater warms too quickly.",
    "Meteor showers peak after midnight in dark skies.",
    "Penguins huddle in rotating formations to share warmth.",
    "Volcanic ash clouds can ground aircraft for weeks.",
    "Knitting patterns alternate purl and knit stitches.",
    "Lightning heats the surrounding air hotter than the sun.",
    "Tidal pools hide anemones between crashing waves.",
    "Origami cranes begin with folded diagonal creases.",
    "Marathon runners deplete glycogen around the thirtieth kilometer.",
    "Fireflies synchronize their flashes on warm summer evenings.",
)
