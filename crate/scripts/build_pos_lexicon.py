"""Regenerate crates/core/data/nlu/pos_lexicon.tsv from the word lists below.

    python3 scripts/build_pos_lexicon.py > crates/core/data/nlu/pos_lexicon.tsv

Later lists win when a word appears twice, so closed-class tags are listed
last.
"""

LISTS = {
    "NOUN": """
        time year years day days week weekend weekends month months night morning evening afternoon today tomorrow
        yesterday tonight people person man men woman women child children kid kids baby family friend friends mom
        dad mother father brother sister son daughter wife husband parents grandma grandpa boyfriend girlfriend
        thing things stuff way ways place places home house room school college class work job office city
        country world life story stories question questions answer answers problem idea ideas name names
        one ones lot lots bit kind sort type part side end point fact facts number numbers rating score
        movie movies film films show shows series episode episodes season actor actors actress director scene
        scenes plot character characters ending music song songs album band bands singer concert guitar piano
        book books novel novels author authors story chapter page pages library poem poetry series
        animal animals pet pets dog dogs puppy puppies cat cats kitten kittens bird birds fish horse horses cow
        pig chicken rabbit hamster turtle snake lion tiger bear elephant monkey giraffe zoo
        game games sport sports team teams player players football soccer basketball baseball hockey tennis golf
        match coach ball
        food dinner lunch breakfast pizza pasta burger sandwich salad soup cake dessert chocolate coffee tea
        restaurant recipe cheese bread fruit apple banana
        trip trips vacation holiday beach mountain mountains flight travel ocean island river lake park
        technology computer computers phone phones robot robots internet app apps software science space
        news weather politics election president article
        color colour design costume costumes effects visuals soundtrack voice acting director's
        money car cars bus train plane water hair eyes head hand hands heart mind body
        birthday christmas summer winter spring fall party
        chat conversation topic subject
        ha haha lol
    """,
    "VERB": """
        think thought thinks know knew knows like liked likes love loved loves want wanted wants need needed
        needs see saw seen sees watch watched watches look looked looks go went gone goes come came comes get
        got gets make made makes take took taken takes give gave given gives say said says tell told tells talk
        talked talks play played plays read reads write wrote written writes listen listened listens hear heard
        hears feel felt feels find found finds try tried tries use used uses work worked works live lived lives
        recommend recommended recommends enjoy enjoyed enjoys remember remembered remembers forget forgot
        believe believed mean meant means stood stand stands help helped eat ate eaten eats drink drank cook
        cooked travel traveled visited visit buy bought sell sold start started stop stopped finish finished
        finished learn learned teach taught keep kept let put run ran walk walked sing sang dance danced
        call called named born become became seem seemed happen happened prefer preferred hate hated guess
        wish hope hoped miss missed bring brought meet met chat agree adopted adopt own owns owned rate rated
        win won lose lost care cared sleep slept wait waited wonder wondered
        discover discovered imagine imagined appreciate appreciated
    """,
    "ADJ": """
        good great bad best better worse worst nice cool fine amazing awesome awful terrible horrible boring
        interesting funny fun favorite favourite new old young big small little long short high low tough hard
        easy different same other last first next own sure happy sad glad sorry beautiful pretty cute scary
        talented exceptional perfect real true whole entire special popular famous recent main few many much
        more most less least several important favorite hilarious excellent fantastic wonderful brilliant
        super crazy rich black white red blue green yellow orange purple pink brown gray grey dark bright
        delicious tasty hungry tired busy free full empty open close ready able available possible
        impossible likely unlikely smart clever strange weird serious silly kind lucky huge tiny
    """,
    "ADV": """
        really very so too also just still even ever never always often sometimes usually again already
        quite pretty actually probably maybe definitely certainly absolutely totally basically honestly
        especially recently lately together soon later now then here there away back home well anyway
        right exactly almost enough only rather instead yet ago once twice else sometime somewhere
        when where why how
    """,
    "DET": """
        the a an this that these those every each any some no another either neither all both my your his her
        its our their what which whatever whichever
    """,
    "PRON": """
        i me you he him she her it we us they them myself yourself himself herself itself ourselves themselves
        mine yours hers ours theirs who whom whose something anything nothing everything someone anyone
        everyone nobody somebody anybody everybody one's
        i'm i've i'd i'll you're you've you'd you'll he's she's it's we're we've they're they've that's
        what's who's there's here's let's
    """,
    "AUX": """
        am is are was were be been being do does did have has had will would shall should can could may might
        must don't doesn't didn't isn't aren't wasn't weren't haven't hasn't hadn't won't wouldn't can't
        cannot couldn't shouldn't mustn't
    """,
    "ADP": """
        in on at by for with about against between into through during before after above below to from up
        down of off over under around among like without within across behind beside near since until upon
        than
    """,
    "CCONJ": "and but or nor yet plus",
    "SCONJ": "because if although though while whereas unless whether since as that",
    "PART": "not n't to 's",
    "INTJ": """
        yes yeah yep yup no nope nah okay ok sure hi hello hey bye goodbye thanks please wow oh ah uh um hmm
        ouu oops yay hooray alright wait whoa cool ha haha hah
    """,
}

# Words whose tag must not depend on list order above.
OVERRIDES = {
    "out": "ADP",
    "that": "DET",
    "one": "NOUN",
    "born": "VERB",
    "what": "PRON",
    "who": "PRON",
    "which": "DET",
    "like": "VERB",
    "so": "ADV",
    "to": "PART",
    "cool": "ADJ",
    "well": "ADV",
    "wait": "INTJ",
    "ha": "INTJ",
    "haha": "INTJ",
    "since": "SCONJ",
    "her": "PRON",
    "no": "INTJ",
    "sure": "INTJ",
    "super": "ADV",
    "than": "ADP",
    "yet": "ADV",
    "home": "NOUN",
    "fun": "ADJ",
    "travel": "NOUN",
    "kind": "NOUN",
    "pretty": "ADV",
    "close": "ADJ",
}

def main():
    tags = {}
    for tag, words in LISTS.items():
        for w in words.split():
            tags[w] = tag
    tags.update(OVERRIDES)
    print("# word<TAB>TAG (Universal Dependencies coarse tags)")
    for w in sorted(tags):
        print(f"{w}\t{tags[w]}")

if __name__ == "__main__":
    main()
