import types
from unittest import mock

from django.test import SimpleTestCase

from lexicon.types import Caption
from semfilter.exceptions import TaggerUnavailableError
from semfilter.filtering import filter_pair
from semfilter.taggers import PosTagNounExtractor
from semfilter.types import ALL, FilterConfig
from semfilter.wordnet import load_wordnet


GRAPH = load_wordnet()

# "sofa" is tagged as a verb so that the tagger, not the graph, decides
TAGS = {'cat': 'NN', 'cats': 'NNS', 'dog': 'NN', 'sofa': 'VB', 'grass': 'NN'}


def fake_nltk():
    return types.SimpleNamespace(
        word_tokenize=lambda text: text.split(),
        pos_tag=lambda tokens: [(t, TAGS.get(t, 'DT')) for t in tokens],
    )


class PosTagNounExtractorTestCase(SimpleTestCase):
    """Tests that the tagger-based extractor:
        * keeps only tagged nouns the graph indexes, lemmatized
        * honours the noun count
        * plugs into filter_pair
        * reports a missing NLTK as a configuration error
    """

    def setUp(self):
        patcher = mock.patch.dict('sys.modules', {'nltk': fake_nltk()})
        patcher.start()
        self.addCleanup(patcher.stop)
        self.extract = PosTagNounExtractor()

    def test_tagged_nouns(self):
        nouns = self.extract(Caption('two cats and a dog on a sofa'), GRAPH, ALL)
        self.assertEqual(nouns, ['cat', 'dog'])

    def test_noun_count(self):
        self.assertEqual(self.extract(Caption('a dog on grass'), GRAPH, 1), ['dog'])

    def test_repeated_noun_once(self):
        self.assertEqual(self.extract(Caption('a cat and a cat'), GRAPH, ALL), ['cat'])

    def test_in_filter_pair(self):
        decision = filter_pair(Caption('a cat on a sofa'), Caption('a sofa'), GRAPH,
                               FilterConfig(threshold=0.6), extractor=self.extract)
        self.assertFalse(decision.kept)
        self.assertEqual(decision.nouns_q1, ('cat',))
        self.assertEqual(decision.nouns_q2, ())


class TaggerUnavailableTestCase(SimpleTestCase):
    def test_missing_nltk(self):
        with mock.patch.dict('sys.modules', {'nltk': None}):
            with self.assertRaises(TaggerUnavailableError):
                PosTagNounExtractor()
