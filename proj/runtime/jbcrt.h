/* Runtime support for translated methods: the emulated operand stack and the
 * checked helpers that signal JVM exceptions through their return value.
 * ISO C99; everything is static so each translated unit gets its own copy. */
#ifndef JBCRT_H
#define JBCRT_H

#include <jni.h>
#include <math.h>
#include <stdint.h>
#include <stdio.h>
#include <string.h>

#define JBCRT_EXC_ARITHMETIC 1
#define JBCRT_EXC_NULL_POINTER 2
#define JBCRT_EXC_ARRAY_INDEX 3
#define JBCRT_EXC_NEGATIVE_ARRAY_SIZE 4
#define JBCRT_EXC_CLASS_CAST 5
#define JBCRT_EXC_ARRAY_STORE 6
/* The JVM itself raised something (for example OutOfMemoryError). */
#define JBCRT_EXC_PENDING 7

/* Stack macros. They expect a local array `jvalue stack[]` and `int sp`. */
#ifdef JBCRT_DEBUG
#include <stdlib.h>
#define JBCRT_DEPTH_OK(n) \
  ((n) >= 0 && (size_t)(n) <= sizeof stack / sizeof stack[0] \
       ? (void)0 \
       : (fprintf(stderr, "jbcrt: stack depth %d out of range (%s:%d)\n", (n), __FILE__, __LINE__), abort()))
#define JBCRT_SLOT_PUSH (*(JBCRT_DEPTH_OK(sp + 1), &stack[sp++]))
#define JBCRT_SLOT_POP (*(JBCRT_DEPTH_OK(sp - 1), &stack[--sp]))
#else
#define JBCRT_SLOT_PUSH (stack[sp++])
#define JBCRT_SLOT_POP (stack[--sp])
#endif

#define Push(v) (JBCRT_SLOT_PUSH = (v))
#define PushI(x) (JBCRT_SLOT_PUSH.i = (jint)(x))
#define PushJ(x) (JBCRT_SLOT_PUSH.j = (jlong)(x))
#define PushF(x) (JBCRT_SLOT_PUSH.f = (jfloat)(x))
#define PushD(x) (JBCRT_SLOT_PUSH.d = (jdouble)(x))
#define PushA(x) (JBCRT_SLOT_PUSH.l = (jobject)(x))
#define Pop() (JBCRT_SLOT_POP)
#define PopI() (JBCRT_SLOT_POP.i)
#define PopJ() (JBCRT_SLOT_POP.j)
#define PopF() (JBCRT_SLOT_POP.f)
#define PopD() (JBCRT_SLOT_POP.d)
#define PopA() (JBCRT_SLOT_POP.l)

/* Function forms used by the helpers, which receive the stack by pointer. */
#define JBCRT_POP(s, p) ((s)[--*(p)])
#define JBCRT_PUSH(s, p) ((s)[(*(p))++])

static inline jfloat FloatFromBits(uint32_t bits) {
  jfloat f;
  memcpy(&f, &bits, sizeof f);
  return f;
}

static inline jdouble DoubleFromBits(uint64_t bits) {
  jdouble d;
  memcpy(&d, &bits, sizeof d);
  return d;
}

/* Saturating float-to-integer conversions; NaN converts to zero. */
static inline jint F2I(jfloat v) {
  if (v != v) return 0;
  if (v >= 2147483648.0f) return INT32_MAX;
  if (v <= -2147483648.0f) return INT32_MIN;
  return (jint)v;
}

static inline jlong F2L(jfloat v) {
  if (v != v) return 0;
  if (v >= 9223372036854775808.0f) return INT64_MAX;
  if (v <= -9223372036854775808.0f) return INT64_MIN;
  return (jlong)v;
}

static inline jint D2I(jdouble v) {
  if (v != v) return 0;
  if (v >= 2147483648.0) return INT32_MAX;
  if (v <= -2147483648.0) return INT32_MIN;
  return (jint)v;
}

static inline jlong D2L(jdouble v) {
  if (v != v) return 0;
  if (v >= 9223372036854775808.0) return INT64_MAX;
  if (v <= -9223372036854775808.0) return INT64_MIN;
  return (jlong)v;
}

static inline jint jbcrt_throw(JNIEnv *env, const char *class_name, const char *message, jint code) {
  jclass c = (*env)->FindClass(env, class_name);
  if (c != NULL) {
    (*env)->ThrowNew(env, c, message);
    (*env)->DeleteLocalRef(env, c);
  }
  return code;
}

static inline jint jbcrt_null(JNIEnv *env) {
  return jbcrt_throw(env, "java/lang/NullPointerException", NULL, JBCRT_EXC_NULL_POINTER);
}

static inline jint jbcrt_pending(JNIEnv *env) { return (*env)->ExceptionCheck(env) ? JBCRT_EXC_PENDING : 0; }

/* ---- arithmetic ---- */

static inline jint IDiv(JNIEnv *env, jvalue *stack, int *sp) {
  jint b = JBCRT_POP(stack, sp).i;
  jint a = JBCRT_POP(stack, sp).i;
  if (b == 0) return jbcrt_throw(env, "java/lang/ArithmeticException", "/ by zero", JBCRT_EXC_ARITHMETIC);
  JBCRT_PUSH(stack, sp).i = b == -1 ? (jint)(0u - (uint32_t)a) : a / b;
  return 0;
}

static inline jint IRem(JNIEnv *env, jvalue *stack, int *sp) {
  jint b = JBCRT_POP(stack, sp).i;
  jint a = JBCRT_POP(stack, sp).i;
  if (b == 0) return jbcrt_throw(env, "java/lang/ArithmeticException", "/ by zero", JBCRT_EXC_ARITHMETIC);
  JBCRT_PUSH(stack, sp).i = b == -1 ? 0 : a % b;
  return 0;
}

static inline jint LDiv(JNIEnv *env, jvalue *stack, int *sp) {
  jlong b = JBCRT_POP(stack, sp).j;
  jlong a = JBCRT_POP(stack, sp).j;
  if (b == 0) return jbcrt_throw(env, "java/lang/ArithmeticException", "/ by zero", JBCRT_EXC_ARITHMETIC);
  JBCRT_PUSH(stack, sp).j = b == -1 ? (jlong)(0u - (uint64_t)a) : a / b;
  return 0;
}

static inline jint LRem(JNIEnv *env, jvalue *stack, int *sp) {
  jlong b = JBCRT_POP(stack, sp).j;
  jlong a = JBCRT_POP(stack, sp).j;
  if (b == 0) return jbcrt_throw(env, "java/lang/ArithmeticException", "/ by zero", JBCRT_EXC_ARITHMETIC);
  JBCRT_PUSH(stack, sp).j = b == -1 ? 0 : a % b;
  return 0;
}

/* ---- arrays ---- */

static inline jint jbcrt_index(JNIEnv *env, jarray array, jint index) {
  jsize length;
  char message[64];
  if (array == NULL) return jbcrt_null(env);
  length = (*env)->GetArrayLength(env, array);
  if (index >= 0 && index < length) return 0;
  snprintf(message, sizeof message, "Index %ld out of bounds for length %ld", (long)index, (long)length);
  return jbcrt_throw(env, "java/lang/ArrayIndexOutOfBoundsException", message, JBCRT_EXC_ARRAY_INDEX);
}

static inline int jbcrt_is_boolean_array(JNIEnv *env, jarray array) {
  jclass c = (*env)->FindClass(env, "[Z");
  int r = c != NULL && (*env)->IsInstanceOf(env, array, c);
  if (c != NULL) (*env)->DeleteLocalRef(env, c);
  return r;
}

#define JBCRT_PRIMITIVE_ARRAY(Name, Kind, ctype, member, widen)                               \
  static inline jint Name##ALoad(JNIEnv *env, jvalue *stack, int *sp) {                       \
    jint index = JBCRT_POP(stack, sp).i;                                                       \
    jarray array = (jarray)JBCRT_POP(stack, sp).l;                                             \
    ctype v;                                                                                   \
    jint code = jbcrt_index(env, array, index);                                                \
    if (code) return code;                                                                     \
    (*env)->Get##Kind##ArrayRegion(env, (ctype##Array)array, index, 1, &v);                    \
    JBCRT_PUSH(stack, sp).member = widen v;                                                    \
    return 0;                                                                                  \
  }                                                                                            \
  static inline jint Name##AStore(JNIEnv *env, jvalue *stack, int *sp) {                      \
    jvalue value = JBCRT_POP(stack, sp);                                                       \
    jint index = JBCRT_POP(stack, sp).i;                                                       \
    jarray array = (jarray)JBCRT_POP(stack, sp).l;                                             \
    ctype v = (ctype)value.member;                                                             \
    jint code = jbcrt_index(env, array, index);                                                \
    if (code) return code;                                                                     \
    (*env)->Set##Kind##ArrayRegion(env, (ctype##Array)array, index, 1, &v);                    \
    return 0;                                                                                  \
  }

JBCRT_PRIMITIVE_ARRAY(I, Int, jint, i, )
JBCRT_PRIMITIVE_ARRAY(L, Long, jlong, j, )
JBCRT_PRIMITIVE_ARRAY(F, Float, jfloat, f, )
JBCRT_PRIMITIVE_ARRAY(D, Double, jdouble, d, )
JBCRT_PRIMITIVE_ARRAY(C, Char, jchar, i, (jint))
JBCRT_PRIMITIVE_ARRAY(S, Short, jshort, i, (jint))

/* BALOAD/BASTORE serve both byte[] and boolean[]. */
static inline jint BALoad(JNIEnv *env, jvalue *stack, int *sp) {
  jint index = JBCRT_POP(stack, sp).i;
  jarray array = (jarray)JBCRT_POP(stack, sp).l;
  jint code = jbcrt_index(env, array, index);
  if (code) return code;
  if (jbcrt_is_boolean_array(env, array)) {
    jboolean z;
    (*env)->GetBooleanArrayRegion(env, (jbooleanArray)array, index, 1, &z);
    JBCRT_PUSH(stack, sp).i = (jint)z;
  } else {
    jbyte b;
    (*env)->GetByteArrayRegion(env, (jbyteArray)array, index, 1, &b);
    JBCRT_PUSH(stack, sp).i = (jint)b;
  }
  return 0;
}

static inline jint BAStore(JNIEnv *env, jvalue *stack, int *sp) {
  jint value = JBCRT_POP(stack, sp).i;
  jint index = JBCRT_POP(stack, sp).i;
  jarray array = (jarray)JBCRT_POP(stack, sp).l;
  jint code = jbcrt_index(env, array, index);
  if (code) return code;
  if (jbcrt_is_boolean_array(env, array)) {
    jboolean z = (jboolean)(value & 1);
    (*env)->SetBooleanArrayRegion(env, (jbooleanArray)array, index, 1, &z);
  } else {
    jbyte b = (jbyte)value;
    (*env)->SetByteArrayRegion(env, (jbyteArray)array, index, 1, &b);
  }
  return 0;
}

static inline jint AALoad(JNIEnv *env, jvalue *stack, int *sp) {
  jint index = JBCRT_POP(stack, sp).i;
  jarray array = (jarray)JBCRT_POP(stack, sp).l;
  jint code = jbcrt_index(env, array, index);
  if (code) return code;
  JBCRT_PUSH(stack, sp).l = (*env)->GetObjectArrayElement(env, (jobjectArray)array, index);
  return 0;
}

static inline jint AAStore(JNIEnv *env, jvalue *stack, int *sp) {
  jobject value = JBCRT_POP(stack, sp).l;
  jint index = JBCRT_POP(stack, sp).i;
  jarray array = (jarray)JBCRT_POP(stack, sp).l;
  jint code = jbcrt_index(env, array, index);
  if (code) return code;
  /* The JVM checks the element type and throws ArrayStoreException itself. */
  (*env)->SetObjectArrayElement(env, (jobjectArray)array, index, value);
  return (*env)->ExceptionCheck(env) ? JBCRT_EXC_ARRAY_STORE : 0;
}

static inline jint jbcrt_negative_size(JNIEnv *env, jint n) {
  char message[32];
  snprintf(message, sizeof message, "%ld", (long)n);
  return jbcrt_throw(env, "java/lang/NegativeArraySizeException", message, JBCRT_EXC_NEGATIVE_ARRAY_SIZE);
}

static inline jarray jbcrt_new_primitive_array(JNIEnv *env, char code, jint n) {
  switch (code) {
    case 'Z': return (*env)->NewBooleanArray(env, n);
    case 'B': return (*env)->NewByteArray(env, n);
    case 'C': return (*env)->NewCharArray(env, n);
    case 'S': return (*env)->NewShortArray(env, n);
    case 'I': return (*env)->NewIntArray(env, n);
    case 'J': return (*env)->NewLongArray(env, n);
    case 'F': return (*env)->NewFloatArray(env, n);
    case 'D': return (*env)->NewDoubleArray(env, n);
    default: return NULL;
  }
}

/* NEWARRAY; `atype` is the JVM element type code (4 = boolean ... 11 = long). */
static inline jint NewArray(JNIEnv *env, jvalue *stack, int *sp, int atype) {
  static const char codes[] = "ZCFDBSIJ";
  jint n = JBCRT_POP(stack, sp).i;
  jarray a;
  if (n < 0) return jbcrt_negative_size(env, n);
  if (atype < 4 || atype > 11) return jbcrt_pending(env);
  a = jbcrt_new_primitive_array(env, codes[atype - 4], n);
  if (a == NULL) return JBCRT_EXC_PENDING;
  JBCRT_PUSH(stack, sp).l = a;
  return 0;
}

static inline jint ANewArray(JNIEnv *env, jvalue *stack, int *sp, jclass element) {
  jint n = JBCRT_POP(stack, sp).i;
  jobjectArray a;
  if (n < 0) return jbcrt_negative_size(env, n);
  a = (*env)->NewObjectArray(env, n, element, NULL);
  if (a == NULL) return JBCRT_EXC_PENDING;
  JBCRT_PUSH(stack, sp).l = a;
  return 0;
}

/* Class name FindClass accepts for the element type named by `desc`. */
static inline jclass jbcrt_element_class(JNIEnv *env, const char *desc) {
  char name[512];
  size_t len = strlen(desc);
  if (desc[0] == 'L' && len >= 2 && len - 2 < sizeof name) {
    memcpy(name, desc + 1, len - 2);
    name[len - 2] = '\0';
    return (*env)->FindClass(env, name);
  }
  return (*env)->FindClass(env, desc);
}

/* Allocates an array of type `desc` ("[[I", ...) using counts[0..dims). */
static inline jarray jbcrt_multi(JNIEnv *env, const char *desc, const jint *counts, int dims) {
  const char *element = desc + 1;
  jclass element_class;
  jobjectArray outer;
  jint k;
  if (dims == 1 && element[0] != '[' && element[0] != 'L') {
    return jbcrt_new_primitive_array(env, element[0], counts[0]);
  }
  element_class = jbcrt_element_class(env, element);
  if (element_class == NULL) return NULL;
  outer = (*env)->NewObjectArray(env, counts[0], element_class, NULL);
  (*env)->DeleteLocalRef(env, element_class);
  if (outer == NULL || dims == 1) return outer;
  for (k = 0; k < counts[0]; ++k) {
    jarray inner = jbcrt_multi(env, element, counts + 1, dims - 1);
    if (inner == NULL) return NULL;
    (*env)->SetObjectArrayElement(env, outer, k, inner);
    (*env)->DeleteLocalRef(env, inner);
  }
  return outer;
}

static inline jint MultiANewArray(JNIEnv *env, jvalue *stack, int *sp, const char *desc, int dims) {
  jint counts[255];
  jarray a;
  int k;
  for (k = dims - 1; k >= 0; --k) counts[k] = JBCRT_POP(stack, sp).i;
  for (k = 0; k < dims; ++k) {
    if (counts[k] < 0) return jbcrt_negative_size(env, counts[k]);
  }
  a = jbcrt_multi(env, desc, counts, dims);
  if (a == NULL) return JBCRT_EXC_PENDING;
  JBCRT_PUSH(stack, sp).l = a;
  return 0;
}

static inline jint ArrayLength(JNIEnv *env, jvalue *stack, int *sp) {
  jarray array = (jarray)JBCRT_POP(stack, sp).l;
  if (array == NULL) return jbcrt_null(env);
  JBCRT_PUSH(stack, sp).i = (jint)(*env)->GetArrayLength(env, array);
  return 0;
}

/* ---- objects ---- */

static inline jint CheckCast(JNIEnv *env, jvalue *stack, int *sp, jclass cls) {
  jobject o = stack[*sp - 1].l;
  if (o == NULL || (*env)->IsInstanceOf(env, o, cls)) return 0;
  (void)JBCRT_POP(stack, sp);
  return jbcrt_throw(env, "java/lang/ClassCastException", NULL, JBCRT_EXC_CLASS_CAST);
}

#define JBCRT_FIELD(Code, Kind, member, widen, narrow)                                        \
  static inline jint GetField##Code(JNIEnv *env, jvalue *stack, int *sp, jfieldID fid) {      \
    jobject o = JBCRT_POP(stack, sp).l;                                                        \
    if (o == NULL) return jbcrt_null(env);                                                     \
    JBCRT_PUSH(stack, sp).member = widen(*env)->Get##Kind##Field(env, o, fid);                 \
    return 0;                                                                                  \
  }                                                                                            \
  static inline jint PutField##Code(JNIEnv *env, jvalue *stack, int *sp, jfieldID fid) {      \
    jvalue v = JBCRT_POP(stack, sp);                                                           \
    jobject o = JBCRT_POP(stack, sp).l;                                                        \
    if (o == NULL) return jbcrt_null(env);                                                     \
    (*env)->Set##Kind##Field(env, o, fid, narrow);                                             \
    return 0;                                                                                  \
  }

JBCRT_FIELD(Z, Boolean, i, (jint), (jboolean)(v.i & 1))
JBCRT_FIELD(B, Byte, i, (jint), (jbyte)v.i)
JBCRT_FIELD(C, Char, i, (jint), (jchar)v.i)
JBCRT_FIELD(S, Short, i, (jint), (jshort)v.i)
JBCRT_FIELD(I, Int, i, , v.i)
JBCRT_FIELD(J, Long, j, , v.j)
JBCRT_FIELD(F, Float, f, , v.f)
JBCRT_FIELD(D, Double, d, , v.d)
JBCRT_FIELD(L, Object, l, , v.l)

/* Raises NullPointerException for a null receiver. */
static inline int ReceiverOk(JNIEnv *env, jobject receiver) {
  if (receiver != NULL) return 1;
  jbcrt_null(env);
  return 0;
}

/* ---- exception dispatch ---- */

/* Reset the emulated stack to hold only the pending exception, the state a
 * JVM handler starts from. The exception stays pending. */
static inline void AlignWithJVM(JNIEnv *env, jvalue *stack, int *sp) {
  *sp = 0;
  stack[(*sp)++].l = (jobject)(*env)->ExceptionOccurred(env);
}

/* ATHROW: pop the thrown value (null throws NullPointerException instead)
 * and make it the only stack value. Nothing is left pending. */
static inline void AlignThrown(JNIEnv *env, jvalue *stack, int *sp) {
  jobject thrown = JBCRT_POP(stack, sp).l;
  if (thrown == NULL) {
    jclass c = (*env)->FindClass(env, "java/lang/NullPointerException");
    jmethodID init = c ? (*env)->GetMethodID(env, c, "<init>", "()V") : NULL;
    thrown = init ? (*env)->NewObject(env, c, init) : NULL;
  }
  *sp = 0;
  stack[(*sp)++].l = thrown;
}

/* Whether the exception at the bottom of the stack is an instance of `cls`.
 * A pending exception is preserved across the query. */
static inline int InstanceOf(JNIEnv *env, const jvalue *stack, jclass cls) {
  jthrowable pending = (*env)->ExceptionOccurred(env);
  int r;
  if (pending != NULL) (*env)->ExceptionClear(env);
  r = stack[0].l != NULL && (*env)->IsInstanceOf(env, stack[0].l, cls);
  if (pending != NULL) (*env)->Throw(env, pending);
  return r;
}

static inline void ClearException(JNIEnv *env) { (*env)->ExceptionClear(env); }

#endif /* JBCRT_H */
