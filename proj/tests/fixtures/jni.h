/* Minimal stand-in for the JDK's jni.h: just enough of the JNI function
 * table for translated units to be compiled with -fsyntax-only. */
#ifndef JNIFY_STUB_JNI_H
#define JNIFY_STUB_JNI_H

#include <stdarg.h>
#include <stdint.h>

#define JNIEXPORT
#define JNICALL
#define JNI_FALSE 0
#define JNI_TRUE 1

typedef int32_t jint;
typedef int64_t jlong;
typedef int8_t jbyte;
typedef uint8_t jboolean;
typedef uint16_t jchar;
typedef int16_t jshort;
typedef float jfloat;
typedef double jdouble;
typedef jint jsize;

struct _jobject;
typedef struct _jobject *jobject;
typedef jobject jclass;
typedef jobject jstring;
typedef jobject jthrowable;
typedef jobject jarray;
typedef jarray jobjectArray;
typedef jarray jbooleanArray;
typedef jarray jbyteArray;
typedef jarray jcharArray;
typedef jarray jshortArray;
typedef jarray jintArray;
typedef jarray jlongArray;
typedef jarray jfloatArray;
typedef jarray jdoubleArray;

struct _jfieldID;
typedef struct _jfieldID *jfieldID;
struct _jmethodID;
typedef struct _jmethodID *jmethodID;

typedef union jvalue {
  jboolean z;
  jbyte b;
  jchar c;
  jshort s;
  jint i;
  jlong j;
  jfloat f;
  jdouble d;
  jobject l;
} jvalue;

struct JNINativeInterface_;
typedef const struct JNINativeInterface_ *JNIEnv;

#define JNIFY_CALL_FAMILY(Type, type)                                                       \
  type(JNICALL *Call##Type##MethodA)(JNIEnv *, jobject, jmethodID, const jvalue *);         \
  type(JNICALL *CallNonvirtual##Type##MethodA)(JNIEnv *, jobject, jclass, jmethodID,         \
                                               const jvalue *);                             \
  type(JNICALL *CallStatic##Type##MethodA)(JNIEnv *, jclass, jmethodID, const jvalue *);

#define JNIFY_FIELD_FAMILY(Type, type)                                      \
  type(JNICALL *Get##Type##Field)(JNIEnv *, jobject, jfieldID);             \
  void(JNICALL *Set##Type##Field)(JNIEnv *, jobject, jfieldID, type);       \
  type(JNICALL *GetStatic##Type##Field)(JNIEnv *, jclass, jfieldID);        \
  void(JNICALL *SetStatic##Type##Field)(JNIEnv *, jclass, jfieldID, type);

#define JNIFY_ARRAY_FAMILY(Type, type)                                                            \
  type##Array(JNICALL *New##Type##Array)(JNIEnv *, jsize);                                        \
  void(JNICALL *Get##Type##ArrayRegion)(JNIEnv *, type##Array, jsize, jsize, type *);             \
  void(JNICALL *Set##Type##ArrayRegion)(JNIEnv *, type##Array, jsize, jsize, const type *);

struct JNINativeInterface_ {
  jclass(JNICALL *FindClass)(JNIEnv *, const char *);
  jint(JNICALL *Throw)(JNIEnv *, jthrowable);
  jint(JNICALL *ThrowNew)(JNIEnv *, jclass, const char *);
  jthrowable(JNICALL *ExceptionOccurred)(JNIEnv *);
  void(JNICALL *ExceptionClear)(JNIEnv *);
  jboolean(JNICALL *ExceptionCheck)(JNIEnv *);
  void(JNICALL *DeleteLocalRef)(JNIEnv *, jobject);
  jboolean(JNICALL *IsSameObject)(JNIEnv *, jobject, jobject);
  jboolean(JNICALL *IsInstanceOf)(JNIEnv *, jobject, jclass);
  jobject(JNICALL *NewObject)(JNIEnv *, jclass, jmethodID, ...);
  jobject(JNICALL *NewObjectA)(JNIEnv *, jclass, jmethodID, const jvalue *);
  jmethodID(JNICALL *GetMethodID)(JNIEnv *, jclass, const char *, const char *);
  jmethodID(JNICALL *GetStaticMethodID)(JNIEnv *, jclass, const char *, const char *);
  jfieldID(JNICALL *GetFieldID)(JNIEnv *, jclass, const char *, const char *);
  jfieldID(JNICALL *GetStaticFieldID)(JNIEnv *, jclass, const char *, const char *);
  jstring(JNICALL *NewStringUTF)(JNIEnv *, const char *);
  jsize(JNICALL *GetArrayLength)(JNIEnv *, jarray);
  jobjectArray(JNICALL *NewObjectArray)(JNIEnv *, jsize, jclass, jobject);
  jobject(JNICALL *GetObjectArrayElement)(JNIEnv *, jobjectArray, jsize);
  void(JNICALL *SetObjectArrayElement)(JNIEnv *, jobjectArray, jsize, jobject);

  JNIFY_CALL_FAMILY(Object, jobject)
  JNIFY_CALL_FAMILY(Boolean, jboolean)
  JNIFY_CALL_FAMILY(Byte, jbyte)
  JNIFY_CALL_FAMILY(Char, jchar)
  JNIFY_CALL_FAMILY(Short, jshort)
  JNIFY_CALL_FAMILY(Int, jint)
  JNIFY_CALL_FAMILY(Long, jlong)
  JNIFY_CALL_FAMILY(Float, jfloat)
  JNIFY_CALL_FAMILY(Double, jdouble)
  JNIFY_CALL_FAMILY(Void, void)

  JNIFY_FIELD_FAMILY(Object, jobject)
  JNIFY_FIELD_FAMILY(Boolean, jboolean)
  JNIFY_FIELD_FAMILY(Byte, jbyte)
  JNIFY_FIELD_FAMILY(Char, jchar)
  JNIFY_FIELD_FAMILY(Short, jshort)
  JNIFY_FIELD_FAMILY(Int, jint)
  JNIFY_FIELD_FAMILY(Long, jlong)
  JNIFY_FIELD_FAMILY(Float, jfloat)
  JNIFY_FIELD_FAMILY(Double, jdouble)

  JNIFY_ARRAY_FAMILY(Boolean, jboolean)
  JNIFY_ARRAY_FAMILY(Byte, jbyte)
  JNIFY_ARRAY_FAMILY(Char, jchar)
  JNIFY_ARRAY_FAMILY(Short, jshort)
  JNIFY_ARRAY_FAMILY(Int, jint)
  JNIFY_ARRAY_FAMILY(Long, jlong)
  JNIFY_ARRAY_FAMILY(Float, jfloat)
  JNIFY_ARRAY_FAMILY(Double, jdouble)
};

#endif
