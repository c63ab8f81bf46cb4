"""IRI constants for the vocabularies the engine treats specially."""

RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
OWL = "http://www.w3.org/2002/07/owl#"
XSD = "http://www.w3.org/2001/XMLSchema#"

RDF_TYPE = RDF + "type"
RDF_LANGSTRING = RDF + "langString"
RDFS_LABEL = RDFS + "label"
RDFS_SUBCLASSOF = RDFS + "subClassOf"

OWL_SAMEAS = OWL + "sameAs"
OWL_DIFFERENTFROM = OWL + "differentFrom"
OWL_DISJOINTWITH = OWL + "disjointWith"
OWL_FUNCTIONAL_PROPERTY = OWL + "FunctionalProperty"
OWL_DATATYPE_PROPERTY = OWL + "DatatypeProperty"
OWL_OBJECT_PROPERTY = OWL + "ObjectProperty"

XSD_STRING = XSD + "string"
XSD_DECIMAL = XSD + "decimal"
XSD_INTEGER = XSD + "integer"
XSD_DATE = XSD + "date"
XSD_GYEAR = XSD + "gYear"

# Lexical forms of these datatypes are read as numbers by max/min/average etc.
NUMERIC_DATATYPES = frozenset(
    XSD + name
    for name in (
        "decimal", "integer", "int", "long", "short", "byte",
        "nonNegativeInteger", "nonPositiveInteger", "positiveInteger",
        "negativeInteger", "unsignedLong", "unsignedInt", "unsignedShort",
        "unsignedByte", "double", "float", "gYear",
    )
)

DBR = "http://dbpedia.org/resource/"
DBO = "http://dbpedia.org/ontology/"
DBP = "http://dbpedia.org/property/"
FOAF = "http://xmlns.com/foaf/0.1/"
