#include "powergrain/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "powergrain/error.hpp"

namespace powergrain {

namespace {

constexpr std::array<std::string_view, 9> kBucketNames = {
    "ScalarArithmetic", "ScalarMemory", "ScalarLogic",
    "VectorArithmetic", "VectorMemory", "VectorLogic",
    "Branch",           "Jump",         "Other"};

constexpr std::array<std::string_view, 9> kBucketKeys = {
    "sa", "sm", "sl", "va", "vm", "vl", "br", "jm", "other"};

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Tokens objdump/perf print before the actual mnemonic.
bool is_prefix_token(std::string_view tok) {
  static constexpr std::string_view kPrefixes[] = {
      "lock", "rep", "repe", "repz", "repne", "repnz", "bnd", "notrack",
      "data16", "data32", "addr32", "cs", "ds", "es", "fs", "gs", "ss"};
  if (tok.starts_with("rex")) return true;  // objdump prints bare rex prefixes
  return std::find(std::begin(kPrefixes), std::end(kPrefixes), tok) !=
         std::end(kPrefixes);
}

// The rule corpus. Exact rules win over prefix rules; among prefix rules the
// longest matching pattern wins; later lines override earlier ones. Grouped
// by bucket, with the interesting collisions called out where they happen.
constexpr std::string_view kBuiltinRules = R"(# powergrain x86 classifier rules v1
# kind	pattern	bucket
#
# --- scalar arithmetic ---------------------------------------------------
exact	add	sa
exact	sub	sa
exact	adc	sa
exact	sbb	sa
exact	imul	sa
exact	mul	sa
exact	idiv	sa
exact	div	sa
exact	inc	sa
exact	dec	sa
exact	neg	sa
exact	mulx	sa
exact	adcx	sa
exact	adox	sa
exact	crc32	sa
# sign-extension widening (cdq family, AT&T spellings included)
exact	cbw	sa
exact	cwde	sa
exact	cdqe	sa
exact	cwd	sa
exact	cdq	sa
exact	cqo	sa
exact	cbtw	sa
exact	cwtl	sa
exact	cltq	sa
exact	cwtd	sa
exact	cltd	sa
exact	cqto	sa
# SSE/AVX scalar float math ("s" = scalar suffix family)
prefix	adds	sa
prefix	subs	sa
prefix	muls	sa
prefix	divs	sa
prefix	sqrts	sa
prefix	mins	sa
prefix	maxs	sa
prefix	rounds	sa
prefix	rcps	sa
prefix	rsqrts	sa
prefix	vadds	sa
prefix	vsubs	sa
prefix	vmuls	sa
prefix	vdivs	sa
prefix	vsqrts	sa
prefix	vmins	sa
prefix	vmaxs	sa
prefix	vrounds	sa
prefix	vrcps	sa
prefix	vrsqrts	sa
# scalar FMA: the 132/213/231 forms ending in sd/ss. The packed vfmaddsub
# mnemonics diverge at the 7th character, so these longer prefixes are safe.
prefix	vfmadd132s	sa
prefix	vfmadd213s	sa
prefix	vfmadd231s	sa
prefix	vfmsub132s	sa
prefix	vfmsub213s	sa
prefix	vfmsub231s	sa
prefix	vfnmadd132s	sa
prefix	vfnmadd213s	sa
prefix	vfnmadd231s	sa
prefix	vfnmsub132s	sa
prefix	vfnmsub213s	sa
prefix	vfnmsub231s	sa
# scalar conversions
prefix	cvts	sa
prefix	cvtts	sa
prefix	vcvts	sa
prefix	vcvtts	sa
# x87
prefix	fadd	sa
prefix	fsub	sa
prefix	fmul	sa
prefix	fdiv	sa
prefix	fiadd	sa
prefix	fisub	sa
prefix	fimul	sa
prefix	fidiv	sa
exact	fsqrt	sa
exact	fabs	sa
exact	fchs	sa
exact	frndint	sa
exact	fscale	sa
exact	fprem	sa
exact	fprem1	sa
exact	f2xm1	sa
exact	fyl2x	sa
exact	fyl2xp1	sa
exact	fsin	sa
exact	fcos	sa
exact	fsincos	sa
exact	fptan	sa
exact	fpatan	sa
#
# --- scalar memory -------------------------------------------------------
prefix	mov	sm
exact	movabs	sm
prefix	movs	sm
prefix	movz	sm
exact	lea	sm
exact	push	sm
exact	pusha	sm
exact	pushf	sm
exact	pop	sm
exact	popa	sm
exact	popf	sm
exact	xchg	sm
prefix	cmpxchg	sm
exact	xadd	sm
exact	xlat	sm
prefix	cmov	sm
exact	stos	sm
exact	lods	sm
exact	leave	sm
exact	enter	sm
exact	movnti	sm
prefix	prefetch	sm
prefix	fld	sm
prefix	fst	sm
exact	fild	sm
exact	fist	sm
exact	fistp	sm
exact	fisttp	sm
exact	fxch	sm
#
# --- scalar logic --------------------------------------------------------
exact	and	sl
exact	or	sl
exact	xor	sl
exact	not	sl
exact	test	sl
exact	cmp	sl
exact	shl	sl
exact	shr	sl
exact	sal	sl
exact	sar	sl
exact	rol	sl
exact	ror	sl
exact	rcl	sl
exact	rcr	sl
exact	shld	sl
exact	shrd	sl
exact	shlx	sl
exact	shrx	sl
exact	sarx	sl
exact	rorx	sl
exact	bt	sl
exact	bts	sl
exact	btr	sl
exact	btc	sl
exact	bsf	sl
exact	bsr	sl
exact	bswap	sl
exact	popcnt	sl
exact	lzcnt	sl
exact	tzcnt	sl
exact	andn	sl
exact	bextr	sl
exact	bzhi	sl
exact	pdep	sl
exact	pext	sl
exact	blsi	sl
exact	blsmsk	sl
exact	blsr	sl
prefix	set	sl
exact	scas	sl
exact	cmps	sl
exact	clc	sl
exact	stc	sl
exact	cmc	sl
exact	cld	sl
exact	std	sl
prefix	fcom	sl
prefix	fucom	sl
exact	ftst	sl
exact	fxam	sl
# "cmpsd" reads as either the string compare or the SSE scalar compare;
# both are compares, so the logic family is right either way.
exact	cmpsd	sl
exact	cmpss	sl
prefix	vcmps	sl
# objdump prints SSE compares with the condition folded into the mnemonic
prefix	cmpeqs	sl
prefix	cmplts	sl
prefix	cmples	sl
prefix	cmpneqs	sl
prefix	cmpnlts	sl
prefix	cmpnles	sl
prefix	cmpords	sl
prefix	cmpunords	sl
#
# --- vector arithmetic ---------------------------------------------------
prefix	addp	va
prefix	subp	va
prefix	mulp	va
prefix	divp	va
prefix	sqrtp	va
prefix	minp	va
prefix	maxp	va
prefix	roundp	va
prefix	rcpp	va
prefix	rsqrtp	va
prefix	addsub	va
prefix	haddp	va
prefix	hsubp	va
prefix	dpp	va
prefix	padd	va
prefix	psub	va
prefix	pmul	va
prefix	pmadd	va
prefix	pmin	va
prefix	pmax	va
prefix	pavg	va
prefix	pabs	va
prefix	psad	va
prefix	psign	va
prefix	phadd	va
prefix	phsub	va
prefix	pclmul	va
prefix	aes	va
prefix	sha	va
prefix	cvt	va
prefix	vcvt	va
prefix	vadd	va
prefix	vsub	va
prefix	vmul	va
prefix	vdiv	va
prefix	vsqrt	va
prefix	vmin	va
prefix	vmax	va
prefix	vround	va
prefix	vrcp	va
prefix	vrsqrt	va
prefix	vfmadd	va
prefix	vfmsub	va
prefix	vfnmadd	va
prefix	vfnmsub	va
prefix	vaddsub	va
prefix	vhadd	va
prefix	vhsub	va
prefix	vdpp	va
prefix	vpadd	va
prefix	vpsub	va
prefix	vpmul	va
prefix	vpmadd	va
prefix	vpmin	va
prefix	vpmax	va
prefix	vpavg	va
prefix	vpabs	va
prefix	vpsad	va
prefix	vpsign	va
prefix	vphadd	va
prefix	vphsub	va
prefix	vpdp	va
prefix	vpclmul	va
# anything else starting with "v" is an AVX op we have no finer rule for
prefix	v	va
#
# --- vector memory -------------------------------------------------------
prefix	movap	vm
prefix	movup	vm
prefix	movdq	vm
prefix	movnt	vm
prefix	movmsk	vm
exact	movddup	vm
exact	movshdup	vm
exact	movsldup	vm
exact	movhps	vm
exact	movhpd	vm
exact	movlps	vm
exact	movlpd	vm
exact	movhlps	vm
exact	movlhps	vm
exact	movd	vm
exact	lddqu	vm
exact	vlddqu	vm
prefix	shufp	vm
prefix	unpck	vm
prefix	blendp	vm
prefix	blendvp	vm
exact	insertps	vm
exact	extractps	vm
prefix	pshuf	vm
prefix	punpck	vm
prefix	pack	vm
prefix	pinsr	vm
prefix	pextr	vm
prefix	pmov	vm
prefix	palignr	vm
prefix	pblend	vm
prefix	kmov	vm
prefix	vmov	vm
prefix	vshuf	vm
prefix	vunpck	vm
prefix	vblend	vm
prefix	vinsert	vm
prefix	vextract	vm
prefix	vbroadcast	vm
prefix	vgather	vm
prefix	vscatter	vm
prefix	vmask	vm
prefix	vexpand	vm
prefix	vcompress	vm
prefix	vperm	vm
prefix	vpshuf	vm
prefix	vpunpck	vm
prefix	vpack	vm
prefix	vpinsr	vm
prefix	vpextr	vm
prefix	vpmov	vm
prefix	vpalignr	vm
prefix	vpblend	vm
prefix	vpbroadcast	vm
prefix	vpgather	vm
prefix	vpscatter	vm
prefix	vpexpand	vm
prefix	vpcompress	vm
prefix	maskmov	vm
# AVX scalar moves stay scalar
exact	vmovsd	sm
exact	vmovss	sm
exact	vmovshdup	vm
exact	vmovsldup	vm
exact	vmovddup	vm
#
# --- vector logic --------------------------------------------------------
prefix	andp	vl
prefix	andnp	vl
prefix	orp	vl
prefix	xorp	vl
prefix	pand	vl
prefix	por	vl
prefix	pxor	vl
prefix	pcmp	vl
prefix	ptest	vl
prefix	psll	vl
prefix	psrl	vl
prefix	psra	vl
prefix	vand	vl
prefix	vorp	vl
prefix	vxor	vl
prefix	vpand	vl
prefix	vpor	vl
prefix	vpxor	vl
prefix	vpcmp	vl
prefix	vptest	vl
prefix	vtest	vl
prefix	vpsll	vl
prefix	vpsrl	vl
prefix	vpsra	vl
prefix	vpternlog	vl
prefix	vzero	vl
prefix	cmpp	vl
prefix	vcmp	vl
prefix	cmpeqp	vl
prefix	cmpltp	vl
prefix	cmplep	vl
prefix	cmpneqp	vl
prefix	cmpnltp	vl
prefix	cmpnlep	vl
prefix	cmpordp	vl
prefix	cmpunordp	vl
#
# --- branches (conditional control transfer) -----------------------------
prefix	j	br
prefix	loop	br
exact	jcxz	br
exact	jecxz	br
exact	jrcxz	br
#
# --- jumps (unconditional control transfer) ------------------------------
exact	jmp	jm
exact	ljmp	jm
exact	call	jm
exact	lcall	jm
exact	ret	jm
exact	lret	jm
exact	retf	jm
exact	iret	jm
exact	syscall	jm
exact	sysret	jm
exact	sysenter	jm
exact	sysexit	jm
exact	int	jm
#
# --- other ---------------------------------------------------------------
exact	nop	other
exact	endbr32	other
exact	endbr64	other
exact	hlt	other
exact	pause	other
exact	cpuid	other
exact	rdtsc	other
exact	rdtscp	other
exact	rdpmc	other
exact	rdmsr	other
exact	wrmsr	other
exact	lfence	other
exact	mfence	other
exact	sfence	other
exact	clflush	other
exact	clflushopt	other
exact	ud2	other
exact	int3	other
exact	cli	other
exact	sti	other
exact	fwait	other
exact	wait	other
exact	fnop	other
exact	finit	other
exact	fninit	other
exact	fclex	other
exact	fnclex	other
exact	fldcw	other
exact	fnstcw	other
exact	fstcw	other
exact	fnstsw	other
exact	fstsw	other
exact	xgetbv	other
exact	xsetbv	other
exact	verr	other
exact	verw	other
)";

}  // namespace

std::string_view bucket_name(InstructionBucket b) {
  return kBucketNames[static_cast<std::size_t>(b)];
}

std::string_view bucket_key(InstructionBucket b) {
  return kBucketKeys[static_cast<std::size_t>(b)];
}

std::optional<InstructionBucket> bucket_from_string(std::string_view s) {
  const std::string lower = to_lower(s);
  for (std::size_t i = 0; i < kBucketKeys.size(); ++i) {
    if (lower == kBucketKeys[i] || lower == to_lower(kBucketNames[i])) {
      return static_cast<InstructionBucket>(i);
    }
  }
  return std::nullopt;
}

bool InstructionHistogram::valid(double tol) const {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0)) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= tol && other_fraction >= 0.0 &&
         other_fraction <= 1.0;
}

InstructionHistogram InstructionHistogram::one_hot(InstructionBucket b) {
  InstructionHistogram h;
  h[b] = 1.0;
  return h;
}

InstructionHistogram InstructionHistogram::uniform() {
  InstructionHistogram h;
  h.p.fill(1.0 / kModelBucketCount);
  return h;
}

std::string_view builtin_rules_text() { return kBuiltinRules; }

RuleTable::RuleTable(std::span<const ClassifierRule> rules) {
  for (const auto& r : rules) add(r);
  std::stable_sort(prefix_.begin(), prefix_.end(),
                   [](const auto& a, const auto& b) {
                     return a.first.size() > b.first.size();
                   });
}

void RuleTable::add(const ClassifierRule& rule) {
  if (rule.kind == RuleKind::Exact) {
    exact_[rule.pattern] = rule.bucket;  // later rules override
    return;
  }
  auto it = std::find_if(prefix_.begin(), prefix_.end(),
                         [&](const auto& p) { return p.first == rule.pattern; });
  if (it != prefix_.end()) {
    it->second = rule.bucket;
  } else {
    prefix_.emplace_back(rule.pattern, rule.bucket);
  }
}

const RuleTable& RuleTable::builtin() {
  static const RuleTable table = RuleTable::parse(kBuiltinRules, "<builtin>");
  return table;
}

RuleTable RuleTable::parse(std::string_view text, std::string_view source_name) {
  std::vector<ClassifierRule> rules;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    // strip comment and surrounding whitespace
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) {
      line.remove_suffix(1);
    }
    if (line.empty()) continue;

    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string_view::npos
                          ? std::string_view::npos
                          : line.find('\t', tab1 + 1);
    if (tab1 == std::string_view::npos || tab2 == std::string_view::npos) {
      throw SchemaViolation(std::string(source_name) +
                                ": expected kind<TAB>pattern<TAB>bucket",
                            line_no);
    }
    const std::string kind = to_lower(line.substr(0, tab1));
    const std::string pattern = to_lower(std::string(line.substr(tab1 + 1, tab2 - tab1 - 1)));
    const std::string_view bucket_str = line.substr(tab2 + 1);

    RuleKind rk;
    if (kind == "exact") {
      rk = RuleKind::Exact;
    } else if (kind == "prefix") {
      rk = RuleKind::Prefix;
    } else {
      throw SchemaViolation(std::string(source_name) + ": unknown rule kind '" +
                                kind + "'",
                            line_no);
    }
    if (pattern.empty()) {
      throw SchemaViolation(std::string(source_name) + ": empty pattern", line_no);
    }
    const auto bucket = bucket_from_string(bucket_str);
    if (!bucket) {
      throw SchemaViolation(std::string(source_name) + ": unknown bucket '" +
                                std::string(bucket_str) + "'",
                            line_no);
    }
    rules.push_back({rk, pattern, *bucket});
  }
  return RuleTable(rules);
}

RuleTable RuleTable::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw SourceUnavailable("cannot open rule table: " + file.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), file.string());
}

std::string canonical_mnemonic(std::string_view raw) {
  const std::string lower = to_lower(raw);
  std::istringstream stream(lower);
  std::string tok;
  while (stream >> tok) {
    if (is_prefix_token(tok)) continue;
    // strip stray trailing punctuation from odd disassembly layouts
    while (!tok.empty() && (tok.back() == ',' || tok.back() == ':')) {
      tok.pop_back();
    }
    return tok;
  }
  return {};
}

InstructionBucket RuleTable::classify(std::string_view mnemonic) const {
  const std::string canon = canonical_mnemonic(mnemonic);
  if (canon.empty()) return InstructionBucket::Other;

  if (auto it = exact_.find(canon); it != exact_.end()) return it->second;

  // AT&T operand-size suffix: addl -> add, pushq -> push
  if (canon.size() > 1) {
    const char last = canon.back();
    if (last == 'b' || last == 'w' || last == 'l' || last == 'q') {
      if (auto it = exact_.find(canon.substr(0, canon.size() - 1));
          it != exact_.end()) {
        return it->second;
      }
    }
  }

  for (const auto& [pattern, bucket] : prefix_) {
    if (canon.starts_with(pattern)) return bucket;
  }
  return InstructionBucket::Other;
}

InstructionBucket classify_mnemonic(std::string_view mnemonic) {
  return RuleTable::builtin().classify(mnemonic);
}

InstructionHistogram build_histogram(std::span<const WeightedMnemonic> samples,
                                     const RuleTable& table) {
  std::array<double, kModelBucketCount> sums{};
  double other_sum = 0.0;
  for (const auto& s : samples) {
    if (s.weight < 0.0) {
      throw DomainError("negative sample weight for '" + s.mnemonic + "'");
    }
    const InstructionBucket b = table.classify(s.mnemonic);
    if (b == InstructionBucket::Other) {
      other_sum += s.weight;
    } else {
      sums[static_cast<std::size_t>(b)] += s.weight;
    }
  }
  double model_total = 0.0;
  for (double v : sums) model_total += v;
  if (model_total <= 0.0) {
    throw EmptyHistogram("no sample weight in any model bucket");
  }
  InstructionHistogram h;
  for (std::size_t k = 0; k < kModelBucketCount; ++k) {
    h.p[k] = sums[k] / model_total;
  }
  h.other_fraction = other_sum / (other_sum + model_total);
  return h;
}

}  // namespace powergrain
